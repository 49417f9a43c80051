//! Print the asymptotic speed of every method for one pattern, the way
//! the comparison tables are produced.
//!
//! ```sh
//! cargo run --release --example speed_table -- abba 0.3
//! ```
//!
//! The optional second argument is the probability of the first symbol
//! (binary alphabets only); default uniform.

use matchspeed::classics::{build_machine, AlgorithmId};
use matchspeed::machine::{Alphabet, IidModel, Pattern};
use matchspeed::markov::asymptotic_speed;
use matchspeed::strategy::{fastest_strategy, k_heuristic, FastestOptions};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let word = args.get(1).map(String::as_str).unwrap_or("abb").as_bytes();
    let alphabet = Alphabet::from_text(word).expect("pattern bytes");
    let pattern = Pattern::from_bytes(&alphabet, word).expect("pattern");
    let model = match args.get(2) {
        Some(p) if alphabet.len() == 2 => {
            let p: f64 = p.parse().expect("probability");
            IidModel::new(vec![p, 1.0 - p]).expect("distribution")
        }
        _ => IidModel::uniform(alphabet.len()),
    };

    println!("method\tspeed\tstates");
    for algo in AlgorithmId::MACHINE_BACKED {
        let machine = build_machine(algo, &alphabet, &pattern).unwrap();
        let report = asymptotic_speed(&machine, &model).unwrap();
        println!(
            "{}\t{:.6}\t{}",
            algo.name(),
            report.speed,
            report.analyzed_states
        );
    }
    for k in 1..=3 {
        let (strategy, report) =
            k_heuristic(&pattern, alphabet.len(), &model, k, None).unwrap();
        println!(
            "heuristic-{k}\t{:.6}\t{}",
            report.speed,
            strategy.machine.num_states()
        );
    }
    if pattern.len() <= 4 {
        let (strategy, report) =
            fastest_strategy(&pattern, alphabet.len(), &model, FastestOptions::default())
                .unwrap();
        println!(
            "fastest\t{:.6}\t{}",
            report.speed,
            strategy.machine.num_states()
        );
    }
}
