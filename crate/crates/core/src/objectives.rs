//! Contrastive objectives over batches of sentence embeddings.
//!
//! Every loss takes row-major `[N, d]` embedding matrices (row `i` of each
//! matrix belongs to sentence `i`) and returns its value together with the
//! analytic gradient with respect to each input matrix. All losses are
//! mean-reduced over the batch.
//!
//! - [`infonce_loss`]: in-batch contrastive loss; row `i` of the positives
//!   is the target for anchor `i`, every other positive is a negative.
//! - [`delta`]/[`deltas`]: `cos(h, h#) - cos(h, h+)`.
//! - [`bml_loss`]: bidirectional margin loss keeping each gap inside
//!   `[-beta, -alpha]`.
//! - [`pl_loss`] / [`nl_loss`]: ablations that treat the soft negative as a
//!   plain positive or as an extra plain negative.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::Tensor;

/// Smallest vector norm accepted by cosine similarity.
pub const MIN_NORM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Hyperparams {
    /// Softmax temperature.
    pub tau: f64,
    /// Lower edge of the required gap between positive and soft-negative similarity.
    pub alpha: f64,
    /// Upper edge of that gap.
    pub beta: f64,
    /// Weight of the margin loss in the total.
    pub lambda: f64,
    pub batch_size: usize,
    pub dropout: f64,
    pub lr: f64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            tau: 0.05,
            alpha: 0.1,
            beta: 0.3,
            lambda: 1e-3,
            batch_size: 64,
            dropout: 0.1,
            lr: 1e-3,
            seed: 42,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0) {
            return Err(Error::Config(format!("temperature must be positive, got {}", self.tau)));
        }
        if !(0.0 <= self.alpha && self.alpha <= self.beta && self.beta <= 2.0) {
            return Err(Error::Config(format!(
                "margins must satisfy 0 <= alpha <= beta <= 2, got alpha={} beta={}",
                self.alpha, self.beta
            )));
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::Config(format!("lambda must be non-negative, got {}", self.lambda)));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch size must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::Config(format!("dropout must lie in [0, 1), got {}", self.dropout)));
        }
        if !(self.lr >= 0.0) {
            return Err(Error::Config(format!("learning rate must be non-negative, got {}", self.lr)));
        }
        Ok(())
    }
}

/// A loss value with gradients for the anchor, positive and (when the loss
/// uses it) soft-negative embedding matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct LossGrad {
    pub value: f64,
    pub anchor: Tensor,
    pub positive: Tensor,
    pub soft_negative: Option<Tensor>,
}

/// The full objective on one batch: InfoNCE plus the weighted margin loss.
#[derive(Debug, Clone, PartialEq)]
pub struct LossBreakdown {
    pub infonce: f64,
    pub deltas: Vec<f64>,
    pub bml: f64,
    pub total: f64,
    pub grads: LossGrad,
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn checked_norm(v: &[f64], what: &str) -> Result<f64> {
    let n = norm(v);
    if !(n > MIN_NORM) {
        return Err(Error::Degenerate(format!("{} has norm {:e}", what, n)));
    }
    Ok(n)
}

/// `u·v / (|u||v|)`.
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Shape { op: "cosine", detail: format!("{} vs {}", u.len(), v.len()) });
    }
    let nu = checked_norm(u, "first vector")?;
    let nv = checked_norm(v, "second vector")?;
    Ok(dot(u, v) / (nu * nv))
}

/// Cosine similarity with its gradients with respect to `u` and `v`.
pub fn cosine_with_grad(u: &[f64], v: &[f64]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    let c = cosine_similarity(u, v)?;
    let (nu, nv) = (norm(u), norm(v));
    let du = u.iter().zip(v).map(|(a, b)| b / (nu * nv) - c * a / (nu * nu)).collect();
    let dv = u.iter().zip(v).map(|(a, b)| a / (nu * nv) - c * b / (nv * nv)).collect();
    Ok((c, du, dv))
}

/// Rows scaled to unit length, with the original norms.
struct Normalized {
    unit: Vec<f64>,
    norms: Vec<f64>,
    d: usize,
}

impl Normalized {
    fn new(m: &Tensor, what: &str) -> Result<Self> {
        let d = m.cols();
        let mut unit = Vec::with_capacity(m.len());
        let mut norms = Vec::with_capacity(m.rows());
        for i in 0..m.rows() {
            let r = m.row(i);
            let n = checked_norm(r, &format!("{} row {}", what, i))?;
            norms.push(n);
            unit.extend(r.iter().map(|x| x / n));
        }
        Ok(Self { unit, norms, d })
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.unit[i * self.d..(i + 1) * self.d]
    }

    fn rows(&self) -> usize {
        self.norms.len()
    }
}

/// Accumulates `dL/dcos(a_i, b_j) = w` into the raw-vector gradients.
fn push_cos_grad(
    a: &Normalized,
    b: &Normalized,
    i: usize,
    j: usize,
    cos: f64,
    w: f64,
    ga: &mut [f64],
    gb: &mut [f64],
) {
    if w == 0.0 {
        return;
    }
    let d = a.d;
    let (ua, ub) = (a.row(i), b.row(j));
    let (na, nb) = (a.norms[i], b.norms[j]);
    let gar = &mut ga[i * d..(i + 1) * d];
    for k in 0..d {
        gar[k] += w * (ub[k] - cos * ua[k]) / na;
    }
    let gbr = &mut gb[j * d..(j + 1) * d];
    for k in 0..d {
        gbr[k] += w * (ua[k] - cos * ub[k]) / nb;
    }
}

fn check_batch(mats: &[(&Tensor, &str)]) -> Result<(usize, usize)> {
    let (first, _) = mats[0];
    let (n, d) = (first.rows(), first.cols());
    if first.is_empty() || n == 0 {
        return Err(Error::Input("empty batch".into()));
    }
    for (m, what) in mats {
        if m.shape().len() != 2 || m.rows() != n || m.cols() != d {
            return Err(Error::Shape {
                op: "loss",
                detail: format!("{} has shape {:?}, expected [{}, {}]", what, m.shape(), n, d),
            });
        }
    }
    Ok((n, d))
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("temperature must be positive, got {}", tau)))
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + libm::log(xs.iter().map(|x| libm::exp(x - m)).sum::<f64>())
}

/// Shared body of InfoNCE and NL: the extra term, when present, is
/// `cos(anchor_i, extra_i) / tau` appended to row `i`'s denominator.
fn contrastive(
    anchor: &Tensor,
    positive: &Tensor,
    extra: Option<&Tensor>,
    tau: f64,
) -> Result<LossGrad> {
    check_tau(tau)?;
    let mut mats = vec![(anchor, "anchors"), (positive, "positives")];
    if let Some(e) = extra {
        mats.push((e, "soft negatives"));
    }
    let (n, d) = check_batch(&mats)?;
    let a = Normalized::new(anchor, "anchors")?;
    let p = Normalized::new(positive, "positives")?;
    let x = extra.map(|e| Normalized::new(e, "soft negatives")).transpose()?;

    let mut ga = vec![0.0; n * d];
    let mut gp = vec![0.0; n * d];
    let mut gx = x.as_ref().map(|_| vec![0.0; n * d]);
    let mut total = 0.0;
    let inv_n = 1.0 / n as f64;
    let mut logits = Vec::with_capacity(n + 1);
    let mut cos_row = Vec::with_capacity(n + 1);

    for i in 0..n {
        logits.clear();
        cos_row.clear();
        for j in 0..p.rows() {
            let c = dot(a.row(i), p.row(j));
            cos_row.push(c);
            logits.push(c / tau);
        }
        if let Some(x) = &x {
            let c = dot(a.row(i), x.row(i));
            cos_row.push(c);
            logits.push(c / tau);
        }
        let lse = log_sum_exp(&logits);
        total += lse - logits[i];
        for (j, (&l, &c)) in logits.iter().zip(&cos_row).enumerate() {
            let prob = libm::exp(l - lse);
            let target = if j == i { 1.0 } else { 0.0 };
            let w = (prob - target) * inv_n / tau;
            if j < n {
                push_cos_grad(&a, &p, i, j, c, w, &mut ga, &mut gp);
            } else if let (Some(x), Some(gx)) = (&x, gx.as_mut()) {
                push_cos_grad(&a, x, i, i, c, w, &mut ga, gx);
            }
        }
    }
    Ok(LossGrad {
        value: total * inv_n,
        anchor: Tensor::matrix(n, d, ga)?,
        positive: Tensor::matrix(n, d, gp)?,
        soft_negative: gx.map(|g| Tensor::matrix(n, d, g)).transpose()?,
    })
}

/// Mean over `i` of `-log(exp(cos(h_i, h+_i)/tau) / sum_j exp(cos(h_i, h+_j)/tau))`.
pub fn infonce_loss(anchor: &Tensor, positive: &Tensor, tau: f64) -> Result<LossGrad> {
    contrastive(anchor, positive, None, tau)
}

/// `cos(h, h#) - cos(h, h+)`.
pub fn delta(h: &[f64], positive: &[f64], soft_negative: &[f64]) -> Result<f64> {
    Ok(cosine_similarity(h, soft_negative)? - cosine_similarity(h, positive)?)
}

/// Per-row gaps together with their gradients; `grads[k]` holds
/// `dΔ_i/d(row i)` for the anchor, positive and soft-negative rows.
pub fn deltas_with_grad(
    anchor: &Tensor,
    positive: &Tensor,
    soft_negative: &Tensor,
) -> Result<(Vec<f64>, [Tensor; 3])> {
    let (n, d) = check_batch(&[(anchor, "anchors"), (positive, "positives"), (soft_negative, "soft negatives")])?;
    let mut out = Vec::with_capacity(n);
    let mut ga = Vec::with_capacity(n * d);
    let mut gp = Vec::with_capacity(n * d);
    let mut gs = Vec::with_capacity(n * d);
    for i in 0..n {
        let (cs, dh_s, ds) = cosine_with_grad(anchor.row(i), soft_negative.row(i))?;
        let (cp, dh_p, dp) = cosine_with_grad(anchor.row(i), positive.row(i))?;
        out.push(cs - cp);
        ga.extend(dh_s.iter().zip(&dh_p).map(|(a, b)| a - b));
        gp.extend(dp.iter().map(|v| -v));
        gs.extend(ds);
    }
    Ok((out, [Tensor::matrix(n, d, ga)?, Tensor::matrix(n, d, gp)?, Tensor::matrix(n, d, gs)?]))
}

pub fn deltas(anchor: &Tensor, positive: &Tensor, soft_negative: &Tensor) -> Result<Vec<f64>> {
    let (n, _) = check_batch(&[(anchor, "anchors"), (positive, "positives"), (soft_negative, "soft negatives")])?;
    (0..n).map(|i| delta(anchor.row(i), positive.row(i), soft_negative.row(i))).collect()
}

/// Mean of `relu(Δ + alpha) + relu(-Δ - beta)` and its gradient with
/// respect to each `Δ_i` (already divided by the batch size).
///
/// The subgradient is `+1` above `-alpha`, `-1` below `-beta`, and `0`
/// inside the band and exactly at either kink.
pub fn bml_loss(deltas: &[f64], alpha: f64, beta: f64) -> Result<(f64, Vec<f64>)> {
    if alpha > beta {
        return Err(Error::Config(format!("alpha ({}) must not exceed beta ({})", alpha, beta)));
    }
    if deltas.is_empty() {
        return Err(Error::Input("empty batch".into()));
    }
    let n = deltas.len() as f64;
    let mut sum = 0.0;
    let mut grad = Vec::with_capacity(deltas.len());
    for &d in deltas {
        let low = d + alpha;
        let high = -d - beta;
        sum += low.max(0.0) + high.max(0.0);
        let g = if low > 0.0 {
            1.0
        } else if high > 0.0 {
            -1.0
        } else {
            0.0
        };
        grad.push(g / n);
    }
    Ok((sum / n, grad))
}

/// `infonce + lambda * bml`.
pub fn total_loss(infonce: f64, bml: f64, lambda: f64) -> f64 {
    infonce + lambda * bml
}

/// InfoNCE against the positives plus InfoNCE against the soft negatives,
/// each with its own in-batch denominator.
pub fn pl_loss(anchor: &Tensor, positive: &Tensor, soft_negative: &Tensor, tau: f64) -> Result<LossGrad> {
    check_batch(&[(anchor, "anchors"), (positive, "positives"), (soft_negative, "soft negatives")])?;
    let first = infonce_loss(anchor, positive, tau)?;
    let second = infonce_loss(anchor, soft_negative, tau)?;
    let mut ga = first.anchor;
    ga.data_mut().iter_mut().zip(second.anchor.data()).for_each(|(a, b)| *a += b);
    Ok(LossGrad {
        value: first.value + second.value,
        anchor: ga,
        positive: first.positive,
        soft_negative: Some(second.positive),
    })
}

/// InfoNCE whose denominator also contains `exp(cos(h_i, h#_i)/tau)`.
pub fn nl_loss(anchor: &Tensor, positive: &Tensor, soft_negative: &Tensor, tau: f64) -> Result<LossGrad> {
    contrastive(anchor, positive, Some(soft_negative), tau)
}

/// InfoNCE plus `lambda` times the margin loss, with combined gradients.
pub fn sncse_loss(anchor: &Tensor, positive: &Tensor, soft_negative: &Tensor, hyper: &Hyperparams) -> Result<LossBreakdown> {
    if hyper.alpha > hyper.beta {
        return Err(Error::Config(format!("alpha ({}) must not exceed beta ({})", hyper.alpha, hyper.beta)));
    }
    let info = infonce_loss(anchor, positive, hyper.tau)?;
    let (ds, [da, dp, dn]) = deltas_with_grad(anchor, positive, soft_negative)?;
    let (bml, dbml) = bml_loss(&ds, hyper.alpha, hyper.beta)?;
    let total = total_loss(info.value, bml, hyper.lambda);

    let mut ga = info.anchor;
    let mut gp = info.positive;
    let d = anchor.cols();
    let mut gn = Tensor::zeros(soft_negative.shape());
    if hyper.lambda != 0.0 {
        for (i, &w) in dbml.iter().enumerate() {
            let w = w * hyper.lambda;
            if w == 0.0 {
                continue;
            }
            let r = i * d..(i + 1) * d;
            ga.data_mut()[r.clone()].iter_mut().zip(&da.data()[r.clone()]).for_each(|(g, s)| *g += w * s);
            gp.data_mut()[r.clone()].iter_mut().zip(&dp.data()[r.clone()]).for_each(|(g, s)| *g += w * s);
            gn.data_mut()[r.clone()].iter_mut().zip(&dn.data()[r]).for_each(|(g, s)| *g += w * s);
        }
    }
    Ok(LossBreakdown {
        infonce: info.value,
        deltas: ds,
        bml,
        total,
        grads: LossGrad { value: total, anchor: ga, positive: gp, soft_negative: Some(gn) },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::grad_check;
    use crate::rng::rng_from;
    use rand::Rng;

    fn mat(rows: &[&[f64]]) -> Tensor {
        Tensor::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn random(n: usize, d: usize, seed: u64) -> Tensor {
        let mut rng = rng_from(seed);
        Tensor::matrix(n, d, (0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
    }

    /// Direct scalar evaluation used as an oracle.
    fn cos_direct(u: &[f64], v: &[f64]) -> f64 {
        let d: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
        d / (u.iter().map(|a| a * a).sum::<f64>().sqrt() * v.iter().map(|a| a * a).sum::<f64>().sqrt())
    }

    fn infonce_direct(h: &Tensor, p: &Tensor, tau: f64) -> f64 {
        let n = h.rows();
        let mut s = 0.0;
        for i in 0..n {
            let num = (cos_direct(h.row(i), p.row(i)) / tau).exp();
            let den: f64 = (0..n).map(|j| (cos_direct(h.row(i), p.row(j)) / tau).exp()).sum();
            s += -(num / den).ln();
        }
        s / n as f64
    }

    fn nl_direct(h: &Tensor, p: &Tensor, x: &Tensor, tau: f64) -> f64 {
        let n = h.rows();
        let mut s = 0.0;
        for i in 0..n {
            let num = (cos_direct(h.row(i), p.row(i)) / tau).exp();
            let den: f64 = (0..n).map(|j| (cos_direct(h.row(i), p.row(j)) / tau).exp()).sum::<f64>()
                + (cos_direct(h.row(i), x.row(i)) / tau).exp();
            s += -(num / den).ln();
        }
        s / n as f64
    }

    #[test]
    fn cosine_examples() {
        assert!((cosine_similarity(&[1.0, 2.0], &[1.0, 2.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(cosine_similarity(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let c = cosine_similarity(&[1.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((c - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn cosine_rejects_zero_vector() {
        assert!(matches!(cosine_similarity(&[0.0, 0.0], &[1.0, 0.0]), Err(Error::Degenerate(_))));
        assert!(matches!(cosine_similarity(&[1e-13, 0.0], &[1.0, 0.0]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn single_pair_infonce_is_zero() {
        let h = mat(&[&[0.3, -0.2, 0.9]]);
        let p = mat(&[&[-0.5, 0.1, 0.2]]);
        assert_eq!(infonce_loss(&h, &p, 0.05).unwrap().value, 0.0);
    }

    #[test]
    fn two_pair_infonce_matches_closed_form() {
        // unit vectors with cos(h_i, p_i) = 0.9 and cos(h_i, p_j) = 0.1
        let a = 0.9f64;
        let b = 0.1f64;
        // choose p_0 = (1, 0, 0), p_1 = (0, 1, 0); h_0 = (a, b, z), h_1 = (b, a, z)
        let z = (1.0 - a * a - b * b).sqrt();
        let h = mat(&[&[a, b, z], &[b, a, z]]);
        let p = mat(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let got = infonce_loss(&h, &p, 0.05).unwrap().value;
        let expected = libm::log1p(libm::exp(-16.0));
        assert!((expected - 1.1254e-7).abs() < 1e-11);
        assert!((got - expected).abs() < 1e-15, "{got} vs {expected}");
    }

    #[test]
    fn misranked_row_costs_more_than_log2() {
        // row 0: off-diagonal similarity exceeds the diagonal one
        let h = mat(&[&[1.0, 0.0]]);
        let p = mat(&[&[0.6, 0.8], &[1.0, 0.1]]);
        // use a 2x2 batch with a second anchor that is well-behaved
        let h2 = mat(&[h.row(0), &[0.0, 1.0]]);
        let tau = 0.05;
        let l0 = {
            let c00 = cos_direct(h2.row(0), p.row(0));
            let c01 = cos_direct(h2.row(0), p.row(1));
            assert!(c01 > c00);
            let s = [c00 / tau, c01 / tau];
            log_sum_exp(&s) - s[0]
        };
        assert!(l0 > core::f64::consts::LN_2);
        let full = infonce_direct(&h2, &p, tau);
        let got = infonce_loss(&h2, &p, tau).unwrap().value;
        assert!((full - got).abs() < 1e-12);
    }

    #[test]
    fn infonce_rejects_bad_inputs() {
        let h = random(2, 3, 1);
        assert!(matches!(infonce_loss(&h, &h, 0.0), Err(Error::Config(_))));
        assert!(matches!(infonce_loss(&h, &random(3, 3, 2), 0.05), Err(Error::Shape { .. })));
        let empty = Tensor::zeros(&[0, 3]);
        assert!(matches!(infonce_loss(&empty, &empty, 0.05), Err(Error::Input(_))));
    }

    #[test]
    fn delta_examples() {
        let h = [0.2, 0.4, -0.1];
        assert_eq!(delta(&h, &h, &h).unwrap(), 0.0);
        // cos(h, h#) = 0.93 and cos(h, h+) = 1.0
        let hn = [0.93, (1.0f64 - 0.93 * 0.93).sqrt()];
        let d = delta(&[1.0, 0.0], &[2.0, 0.0], &hn).unwrap();
        assert!((d + 0.07).abs() < 1e-12, "{d}");
    }

    #[test]
    fn bml_examples() {
        let v = |d: f64| bml_loss(&[d], 0.1, 0.3).unwrap().0;
        assert!(v(-0.2).abs() < 1e-12);
        assert!((v(0.0) - 0.1).abs() < 1e-12);
        assert!((v(-0.5) - 0.2).abs() < 1e-12);
        assert!(matches!(bml_loss(&[0.0], 0.4, 0.3), Err(Error::Config(_))));
    }

    #[test]
    fn bml_subgradient() {
        let (_, g) = bml_loss(&[0.5, -0.2, -0.9, -0.1, -0.3], 0.1, 0.3).unwrap();
        let n = 5.0;
        assert_eq!(g, std::vec![1.0 / n, 0.0, -1.0 / n, 0.0, 0.0]);
    }

    #[test]
    fn total_examples() {
        assert_eq!(total_loss(0.7, 0.3, 0.0), 0.7);
        assert!((total_loss(0.5, 0.2, 1e-3) - 0.5002).abs() < 1e-15);
        assert_eq!(Hyperparams::default().lambda, 1e-3);
    }

    #[test]
    fn pl_is_sum_of_two_infonce_terms() {
        for seed in 0..5 {
            let (h, p, x) = (random(3, 4, seed), random(3, 4, seed + 100), random(3, 4, seed + 200));
            let pl = pl_loss(&h, &p, &x, 0.05).unwrap().value;
            let direct = infonce_direct(&h, &p, 0.05) + infonce_direct(&h, &x, 0.05);
            assert!((pl - direct).abs() < 1e-12);
            let sum = infonce_loss(&h, &p, 0.05).unwrap().value + infonce_loss(&h, &x, 0.05).unwrap().value;
            assert_eq!(pl, sum);
        }
        let one = random(1, 4, 9);
        assert_eq!(pl_loss(&one, &random(1, 4, 10), &random(1, 4, 11), 0.05).unwrap().value, 0.0);
    }

    #[test]
    fn nl_matches_direct_and_dominates_infonce() {
        for seed in 0..5 {
            let (h, p, x) = (random(3, 4, seed), random(3, 4, seed + 100), random(3, 4, seed + 200));
            let nl = nl_loss(&h, &p, &x, 0.05).unwrap().value;
            assert!((nl - nl_direct(&h, &p, &x, 0.05)).abs() < 1e-12);
            assert!(nl >= infonce_loss(&h, &p, 0.05).unwrap().value);
        }
    }

    #[test]
    fn nl_single_pair_with_equal_similarities_is_ln2() {
        let h = mat(&[&[1.0, 0.0]]);
        let p = mat(&[&[0.6, 0.8]]);
        let x = mat(&[&[0.6, -0.8]]);
        let v = nl_loss(&h, &p, &x, 0.05).unwrap().value;
        assert!((v - core::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn sncse_total_combines_components() {
        let hp = Hyperparams::default();
        let (h, p, x) = (random(4, 5, 1), random(4, 5, 2), random(4, 5, 3));
        let b = sncse_loss(&h, &p, &x, &hp).unwrap();
        assert!((b.total - (b.infonce + hp.lambda * b.bml)).abs() < 1e-12);
        assert!(b.bml >= 0.0);
        assert_eq!(b.deltas, deltas(&h, &p, &x).unwrap());
    }

    fn split3(t: &Tensor, n: usize, d: usize) -> (Tensor, Tensor, Tensor) {
        let s = |k: usize| Tensor::matrix(n, d, t.data()[k * n * d..(k + 1) * n * d].to_vec()).unwrap();
        (s(0), s(1), s(2))
    }

    fn join3(g: &LossGrad, n: usize, d: usize) -> Tensor {
        let mut v = g.anchor.data().to_vec();
        v.extend_from_slice(g.positive.data());
        match &g.soft_negative {
            Some(s) => v.extend_from_slice(s.data()),
            None => v.extend(core::iter::repeat(0.0).take(n * d)),
        }
        Tensor::vector(v)
    }

    fn check_all<F>(f: F) -> f64
    where
        F: Fn(&Tensor, &Tensor, &Tensor) -> Result<LossGrad>,
    {
        let mut worst: f64 = 0.0;
        for trial in 0..10u64 {
            let n = 1 + (trial as usize % 4);
            let d = 2 + (trial as usize * 3 % 7);
            let point = random(3, n * d, 1000 + trial).reshape(std::vec![3 * n * d]).unwrap();
            let err = grad_check(
                |x: &Tensor| {
                    let (h, p, s) = split3(x, n, d);
                    let g = f(&h, &p, &s)?;
                    Ok((Tensor::scalar(g.value), join3(&g, n, d)))
                },
                &point,
                1e-6,
            )
            .unwrap();
            worst = worst.max(err);
        }
        worst
    }

    #[test]
    fn gradients_match_finite_differences() {
        let tau = 0.05;
        assert!(check_all(|h, p, _| infonce_loss(h, p, tau)) < 1e-4);
        assert!(check_all(|h, p, s| pl_loss(h, p, s, tau)) < 1e-4);
        assert!(check_all(|h, p, s| nl_loss(h, p, s, tau)) < 1e-4);
        // a large lambda makes the margin term visible in the check
        let hp = Hyperparams { lambda: 0.7, ..Hyperparams::default() };
        assert!(check_all(|h, p, s| sncse_loss(h, p, s, &hp).map(|b| b.grads)) < 1e-4);
    }

    #[test]
    fn cosine_gradient_matches_finite_differences() {
        let u = [0.3, -1.2, 0.5];
        let v = [0.9, 0.2, -0.4];
        let (_, du, dv) = cosine_with_grad(&u, &v).unwrap();
        let mut joined = u.to_vec();
        joined.extend_from_slice(&v);
        let mut g = du.clone();
        g.extend_from_slice(&dv);
        let err = grad_check(
            |x: &Tensor| {
                let c = cosine_similarity(&x.data()[..3], &x.data()[3..])?;
                Ok((Tensor::scalar(c), Tensor::vector(g.clone())))
            },
            &Tensor::vector(joined),
            1e-6,
        )
        .unwrap();
        assert!(err < 1e-8);
    }

    #[test]
    fn bml_is_flat_inside_the_band() {
        // every Δ strictly inside (-beta, -alpha) has zero gradient
        let (v, g) = bml_loss(&[-0.15, -0.2, -0.29], 0.1, 0.3).unwrap();
        assert_eq!(v, 0.0);
        assert!(g.iter().all(|&x| x == 0.0));
    }
}
