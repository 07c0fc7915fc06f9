use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// 1-based ranks in ascending order; tied values share the mean of the
/// ranks they span.
pub fn average_ranks(xs: &[f64]) -> Result<Vec<f64>> {
    if xs.iter().any(|x| x.is_nan()) {
        return Err(Error::NonFinite("cannot rank NaN".into()));
    }
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(a.cmp(&b)));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        // positions i..j hold ranks i+1..=j
        let r = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = r;
        }
        i = j;
    }
    Ok(ranks)
}

fn check_inputs(gold: &[f64], pred: &[f64]) -> Result<()> {
    if gold.len() != pred.len() {
        return Err(Error::Shape { op: "spearman", detail: format!("{} gold vs {} predicted", gold.len(), pred.len()) });
    }
    if gold.len() < 2 {
        return Err(Error::UndefinedCorrelation(format!("need at least 2 pairs, got {}", gold.len())));
    }
    for (name, v) in [("gold", gold), ("predicted", pred)] {
        if v.iter().all(|x| *x == v[0]) {
            return Err(Error::UndefinedCorrelation(format!("{} scores are constant", name)));
        }
    }
    Ok(())
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    (sab / libm::sqrt(saa * sbb)).clamp(-1.0, 1.0)
}

/// Spearman's ρ: Pearson correlation of average ranks.
pub fn spearman(gold: &[f64], pred: &[f64]) -> Result<f64> {
    check_inputs(gold, pred)?;
    Ok(pearson(&average_ranks(gold)?, &average_ranks(pred)?))
}

/// `1 - 6 Σd² / (n³ - n)` over average ranks. Equal to [`spearman`] when
/// neither input has ties.
pub fn spearman_closed_form(gold: &[f64], pred: &[f64]) -> Result<f64> {
    check_inputs(gold, pred)?;
    let rg = average_ranks(gold)?;
    let rp = average_ranks(pred)?;
    let d2: f64 = rg.iter().zip(&rp).map(|(a, b)| (a - b) * (a - b)).sum();
    let n = gold.len() as f64;
    Ok(1.0 - 6.0 * d2 / (n * n * n - n))
}
