//! The evaluation surface on its own: confusion counts, per-class
//! precision/recall/F1, both curves, and the F1-optimal threshold.
//!
//! ```bash
//! cargo run --release --example metrics_report
//! ```

use glassbox::metrics::{best_f1_threshold, confusion, evaluate, prf1, ConfusionMatrix};
use glassbox::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    // a noisy scorer on an imbalanced problem
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 2_000;
    let y: Vec<u8> = (0..n).map(|_| u8::from(rng.gen::<f64>() < 0.05)).collect();
    let scores: Vec<f64> = y
        .iter()
        .map(|&label| {
            let signal = if label == 1 { 0.65 } else { 0.35 };
            (signal + 0.8 * rng.gen::<f64>() - 0.4).clamp(0.0, 1.0)
        })
        .collect();

    let (threshold, f1) = best_f1_threshold(&y, &scores)?;
    println!("f1-optimal threshold {threshold:.4} (f1 {f1:.4})");

    let report = evaluate(&y, &scores, threshold)?;
    println!("auc_roc {:.4}, auc_pr {:.4}", report.auc_roc, report.auc_pr);
    println!(
        "fraud class: precision {:.4}, recall {:.4}, f1 {:.4}",
        report.class1.precision, report.class1.recall, report.class1.f1
    );
    println!(
        "confusion: tn {} fp {} fn {} tp {}",
        report.confusion.tn, report.confusion.fp, report.confusion.fn_, report.confusion.tp
    );

    // hand-fed counts work too
    let cm = ConfusionMatrix {
        tn: 113_453,
        fp: 481,
        fn_: 1_825,
        tp: 112_192,
    };
    let (_, fraud, accuracy) = prf1(&cm);
    println!(
        "\nreference counts: precision {:.4}, recall {:.4}, accuracy {accuracy:.4}",
        fraud.precision, fraud.recall
    );

    // and plain label vectors
    let cm2 = confusion(&[0, 1, 1, 0], &[0, 1, 0, 0])?;
    println!("small example: {cm2:?}");
    Ok(())
}
