//! The diagonal adversary against a list of predictor programs.

use hybridspace::game::{self, PredictorProgram, ProgramKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut programs: Vec<PredictorProgram> = [[0, 1, 0, 0], [1, 1, 0, 1], [0, 0, 1, 1], [1, 0, 1, 0]]
        .iter()
        .enumerate()
        .map(|(id, row)| PredictorProgram::fixed(id, row))
        .collect::<Result<_, _>>()?;
    programs.push(PredictorProgram::new(4, ProgramKind::CopyLast { first: 1 })?);
    programs.push(PredictorProgram::new(5, ProgramKind::Window { width: 2, table: vec![0, 1, 1, 0] })?);
    programs.push(PredictorProgram::custom(6, |history| (history.len() % 3 == 0) as u8));

    let n = programs.len();
    let matrix = game::output_matrix(&programs, n);
    for (p, row) in programs.iter().zip(matrix.entries()) {
        println!("P{}  {:?}", p.id(), row);
    }
    let flip = game::diagonal_digits(&matrix)?;
    println!("flip {flip:?}");

    for p in &programs {
        let result = game::play_game(&flip, p, n);
        println!("P{} -> {:?}", p.id(), result.outcome);
    }
    Ok(())
}
