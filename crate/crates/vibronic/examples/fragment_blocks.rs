//! XOR fragments of a 4-state potential and their Clifford recipes, verified
//! block-diagonal against the dense construction.
//!
//!     cargo run -p vibronic --example fragment_blocks

use vibronic::fragmentation::{fragments, verify_block_diagonal};
use vibronic::grid::GridConfig;
use vibronic::model::{MultiIndex, VibronicModel};

fn main() {
    let mut model = VibronicModel::new(4, vec![1.0], 1);
    for j in 0..4 {
        for i in j..4 {
            model.set_coupling(j, i, MultiIndex::constant(), 0.1 * (j + i) as f64 + 0.05);
            model.set_coupling(j, i, MultiIndex::linear(0), 0.02 * (1 + j) as f64);
        }
    }
    let g = GridConfig::new(2).unwrap();

    for fragment in fragments(&model) {
        let pairs: Vec<String> = fragment
            .pairs
            .iter()
            .map(|(a, b)| format!("({a},{b})"))
            .collect();
        let recipe = match &fragment.clifford {
            None => "already diagonal".to_string(),
            Some(r) => {
                let cnots: Vec<String> = r
                    .cnots
                    .iter()
                    .map(|(c, t)| format!("CNOT {c}->{t}"))
                    .collect();
                format!("{} then H on q{}", if cnots.is_empty() { "(no CNOTs)".into() } else { cnots.join(", ") }, r.control_qubit)
            }
        };
        let leak = verify_block_diagonal(&fragment, &model, g).unwrap();
        println!(
            "H_{}: pairs {:<24} recipe: {:<32} off-block leak {:.1e}",
            fragment.offset,
            pairs.join(" "),
            recipe,
            leak
        );
    }
}
