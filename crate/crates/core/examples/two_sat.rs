//! 2-SAT through the implication graph, checked against brute force.

use hybridspace::dimacs;
use hybridspace::sat::{self, Literal};

const FORMULA: &str = "\
c (x1 or x2) and (not x1 or x3) and (not x3 or x4) and (not x2 or not x4)
p cnf 4 4
1 2 0
-1 3 0
-3 4 0
-2 -4 0
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cnf = dimacs::parse(FORMULA)?;
    let graph = sat::implication_graph(&cnf)?;
    for (node, targets) in graph.iter().enumerate() {
        let from = Literal::new(node / 2, node % 2 == 0);
        let to: Vec<i64> = targets.iter().map(|&t| Literal::new(t / 2, t % 2 == 0).to_dimacs()).collect();
        println!("{:>3} => {to:?}", from.to_dimacs());
    }

    let fast = sat::solve_2sat(&cnf)?;
    let brute = sat::solve_bruteforce(&cnf)?;
    println!("scc:   {}", serde_json::to_string(&fast)?);
    println!("brute: {}", serde_json::to_string(&brute)?);
    assert_eq!(fast.is_sat(), brute.is_sat());

    let mut stricter = cnf.clauses().to_vec();
    stricter.push(vec![Literal::neg(1)]);
    stricter.push(vec![Literal::neg(0)]);
    let stricter = sat::Cnf::new(4, stricter)?;
    println!("with x1 = x2 = false: {}", serde_json::to_string(&sat::solve_2sat(&stricter)?)?);
    Ok(())
}
