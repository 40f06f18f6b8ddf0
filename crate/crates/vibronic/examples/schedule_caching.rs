//! The depth-first cache schedule: every higher-degree monomial reuses its
//! cached prefix, with one live cache register per degree.
//!
//!     cargo run -p vibronic --example schedule_caching

use std::collections::BTreeSet;

use vibronic::circuit::{compute_count, schedule_monomials, ScheduleOp, ValueSource};
use vibronic::model::MultiIndex;

fn main() {
    let terms: BTreeSet<MultiIndex> = [
        MultiIndex::linear(0),
        MultiIndex::linear(1),
        MultiIndex::new(vec![(0, 1), (1, 1)]).unwrap(),
        MultiIndex::new(vec![(0, 1), (1, 1), (2, 1)]).unwrap(),
        MultiIndex::power(0, 2),
    ]
    .into_iter()
    .collect();

    println!("terms: {}", terms.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", "));
    println!("\ncached schedule:");
    let cached = schedule_monomials(&terms, true);
    for op in &cached {
        match op {
            ScheduleOp::Emit { term, source } => println!("  phase {term:<10} from {}", src(source)),
            ScheduleOp::Compute { degree, parent, factor } => {
                println!("  cache{degree} <- {} * Q{factor}", src(parent))
            }
            ScheduleOp::Release { degree } => println!("  release cache{degree}"),
        }
    }
    let uncached = schedule_monomials(&terms, false);
    println!(
        "\nmultiplications: {} cached vs {} uncached",
        compute_count(&cached),
        compute_count(&uncached)
    );
}

fn src(v: &ValueSource) -> String {
    match v {
        ValueSource::Unit => "1".into(),
        ValueSource::Mode(r) => format!("Q{r} register"),
        ValueSource::Cache(l) => format!("cache{l}"),
    }
}
