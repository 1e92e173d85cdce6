use rayon::prelude::*;

use super::{build_certificate, JumpCertificate, JumpError, JumpProblem, JumpVector};
use crate::scalar::Rational;

const BLOCK: u64 = 1 << 16;
/// Slack for f64 rounding in the prefilter; hits are confirmed exactly.
const SLACK: f64 = 1e-7;

#[derive(Clone, Copy)]
struct Best {
    dev: f64,
    n: u64,
}

impl Best {
    fn merge(self, o: Best) -> Best {
        if o.dev < self.dev || (o.dev == self.dev && o.n < self.n) {
            o
        } else {
            self
        }
    }
}

/// Scans `N = M0, 2M0, …, ≤ N_bound` for `{N·v}` inside the `ε`-window around
/// `χ` and returns verified certificates in increasing `N`, at most `limit`.
pub fn search_n(
    p: &JumpProblem,
    jv: &JumpVector,
    chi: &[u8],
    a: &[Rational],
    limit: Option<usize>,
) -> Result<Vec<JumpCertificate>, JumpError> {
    let w: Vec<f64> = jv.scan(p.big_m).iter().map(|x| x.to_f64()).collect();
    let eps = crate::scalar::Scalar::from_rational(p.epsilon.clone()).to_f64();
    let steps = p.n_bound / p.m0;
    let blocks = steps.div_ceil(BLOCK);
    let scan_block = |b: u64| {
        let mut hits = Vec::new();
        let mut best = Best { dev: f64::INFINITY, n: 0 };
        for j in (b * BLOCK + 1)..=((b + 1) * BLOCK).min(steps) {
            let n = j * p.m0;
            let mut dev: f64 = 0.0;
            let mut circ: f64 = 0.0;
            for (x, &c) in w.iter().zip(chi) {
                let y = n as f64 * x;
                let f = y - y.floor();
                dev = dev.max(if c == 0 { f } else { 1.0 - f });
                circ = circ.max(f.min(1.0 - f));
            }
            if circ <= eps + SLACK {
                hits.push(n);
            }
            best = best.merge(Best { dev, n });
        }
        (hits, best)
    };
    // Windows of blocks in parallel; stop after the first window that meets `limit`.
    let window = (rayon::current_num_threads() as u64).max(1) * 2;
    let mut best = Best { dev: f64::INFINITY, n: 0 };
    let mut out = Vec::new();
    let mut rejected = 0;
    let mut start = 0;
    'scan: while start < blocks {
        let end = (start + window).min(blocks);
        let scanned: Vec<(Vec<u64>, Best)> = (start..end).into_par_iter().map(scan_block).collect();
        start = end;
        for (hits, b) in scanned {
            best = best.merge(b);
            for n in hits {
                let cert = build_certificate(p, jv, chi, a, n)?;
                if cert.verified() {
                    out.push(cert);
                    if limit.is_some_and(|l| out.len() >= l) {
                        break 'scan;
                    }
                } else {
                    rejected += 1;
                }
            }
        }
    }
    if out.is_empty() {
        return Err(JumpError::NoHit { bound: p.n_bound, best_n: best.n, best_dev: best.dev, rejected });
    }
    Ok(out)
}
