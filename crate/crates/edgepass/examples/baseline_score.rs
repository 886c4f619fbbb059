//! Scores the render pipeline against a textbook detector (full
//! breadth-first hysteresis, conditional NMS) on the fixed shape corpus.
//! The pipeline propagates weak evidence one step instead of
//! transitively, so agreement is high but not exact.
//!
//!     cargo run --example baseline_score

use edgepass::{compare_with_classic, synth, CannyParams, Precision};

fn main() -> edgepass::Result<()> {
    let params = CannyParams::default();
    println!(
        "{:<14} {:>9} {:>9} {:>9} {:>8} {:>8} {:>10}",
        "image", "precision", "recall", "f1", "strong", "weak", "suppressed"
    );
    for (name, image) in synth::shape_corpus() {
        let cmp = compare_with_classic(&image, &params, Precision::Mediump)?;
        println!(
            "{:<14} {:>9.4} {:>9.4} {:>9.4} {:>8} {:>8} {:>10}",
            name,
            cmp.similarity.precision,
            cmp.similarity.recall,
            cmp.similarity.f1,
            cmp.strong,
            cmp.weak,
            cmp.suppressed
        );
    }
    println!("\nstrong pixels match the baseline exactly at highp; the f1 gap");
    println!("comes from weak pixels the baseline's transitive hysteresis keeps");
    println!("but the single-step weak pass drops (and from storage rounding).");
    Ok(())
}
