//! Rebalance an imbalanced dataset with SMOTE and verify the synthetic
//! points interpolate real minority pairs.
//!
//! ```bash
//! cargo run --release --example smote_balance
//! ```

use glassbox::resample::{smote, SmoteConfig};
use glassbox::synth::make_classification;
use glassbox::Result;

fn main() -> Result<()> {
    let data = make_classification(5_000, 5);
    let before_pos = data.y.iter().filter(|&&v| v == 1).count();
    println!(
        "before: {} positive / {} negative ({:.2}%)",
        before_pos,
        data.y.len() - before_pos,
        100.0 * before_pos as f64 / data.y.len() as f64
    );

    let cfg = SmoteConfig {
        k_neighbors: 5,
        target_ratio: 1.0,
        seed: 1,
    };
    let (bx, by) = smote(&data.x, &data.y, &cfg)?;
    let after_pos = by.iter().filter(|&&v| v == 1).count();
    println!(
        "after:  {} positive / {} negative ({} synthetic rows appended)",
        after_pos,
        by.len() - after_pos,
        by.len() - data.y.len()
    );

    // originals are untouched, synthetics must sit between minority pairs
    for i in 0..data.x.n_rows() {
        assert_eq!(bx.row(i), data.x.row(i));
    }
    let minority: Vec<Vec<f64>> = (0..data.x.n_rows())
        .filter(|&i| data.y[i] == 1)
        .map(|i| data.x.row(i))
        .collect();
    let synthetic = bx.row(data.x.n_rows());
    let on_segment = minority.iter().any(|a| {
        minority.iter().any(|b| {
            let mut u: Option<f64> = None;
            for ((&s, &av), &bv) in synthetic.iter().zip(a).zip(b) {
                let denom = bv - av;
                if denom == 0.0 {
                    if (s - av).abs() > 1e-9 {
                        return false;
                    }
                } else {
                    let cand = (s - av) / denom;
                    match u {
                        None => u = Some(cand),
                        Some(prev) if (prev - cand).abs() > 1e-9 => return false,
                        _ => {}
                    }
                }
            }
            u.map_or(true, |u| (-1e-9..=1.0 + 1e-9).contains(&u))
        })
    });
    println!("first synthetic row lies on a minority segment: {on_segment}");
    Ok(())
}
