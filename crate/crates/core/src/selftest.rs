//! Quick invariant sweep used by `convkit selftest`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blockcode::random_code;
use crate::combinators;
use crate::convolutional::{
    free_distance, free_distance_truncated, generalized_singleton, is_basic, is_basic_by_smith, is_reduced,
    max_minor_degree, unit_memory_from_block, PolyMatrix,
};
use crate::galois::Field;
use crate::matrix::Matrix;
use crate::{Guards, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
    pub passed: usize,
    pub failed: usize,
}

struct Suite {
    result: SuiteResult,
}

impl Suite {
    fn new(name: &str) -> Suite {
        Suite { result: SuiteResult { name: name.into(), passed: 0, failed: 0, failures: Vec::new() } }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok {
            self.result.passed += 1;
        } else {
            self.result.failed += 1;
            if self.result.failures.len() < 5 {
                self.result.failures.push(what());
            }
        }
    }
}

fn fields() -> Result<Vec<Field>> {
    [(2, 1), (3, 1), (2, 2)].iter().map(|&(p, e)| Field::new(p, e, None)).collect()
}

fn field_axioms(out: &mut Suite) -> Result<()> {
    for (p, e) in [(2, 2), (2, 3), (3, 2), (5, 1), (7, 2)] {
        let f = Field::new(p, e, None)?;
        let mut ok = true;
        for a in f.elements() {
            ok &= f.add(a, 0) == a && f.mul(a, 1) == a && f.add(a, f.neg(a)) == 0;
            if a != 0 {
                ok &= f.mul(a, f.inv(a)?) == 1;
            }
            for b in f.elements() {
                ok &= f.frobenius(f.add(a, b)) == f.add(f.frobenius(a), f.frobenius(b));
            }
        }
        out.check(ok, || format!("GF({p}^{e}) axioms"));
    }
    Ok(())
}

fn block_codes(rng: &mut ChaCha8Rng, guards: &Guards, out: &mut Suite) -> Result<()> {
    for f in fields()? {
        for _ in 0..5 {
            let n = rng.gen_range(4..=9);
            let k = rng.gen_range(1..n);
            let c = random_code(&f, n, k, rng)?;
            let dual = c.dual();
            let orth = c.generator().mul(&c.parity_check().transpose())?.is_zero();
            out.check(orth && dual.dim() + c.dim() == n, || format!("duality for {c:?}"));
            let d = c.min_distance(guards)?;
            out.check(d <= n - k + 1, || format!("Singleton bound for {c:?}"));
        }
    }
    Ok(())
}

fn combinator_intervals(rng: &mut ChaCha8Rng, guards: &Guards, out: &mut Suite) -> Result<()> {
    for f in fields()? {
        for _ in 0..3 {
            let n = rng.gen_range(3..=6);
            let k = rng.gen_range(1..n);
            let c = random_code(&f, n, k, rng)?.with_exact_distance(guards)?;
            let mut results = vec![combinators::extend(&c)?, combinators::direct_sum(&c, &c)?, combinators::u_u_plus_v(&c, &c)?];
            if let Ok(t) = combinators::puncture(&c, n) {
                results.push(t);
            }
            if n * n <= 36 && k * k <= 9 {
                results.push(combinators::product(&c, &c)?);
            }
            for t in results {
                let d = t.code.min_distance(guards)?;
                out.check(t.record.d_lo <= d && d <= t.record.d_hi, || {
                    format!("{:?}: d = {d} outside [{}, {}]", t.record.kind, t.record.d_lo, t.record.d_hi)
                });
            }
        }
    }
    Ok(())
}

fn unit_memory(rng: &mut ChaCha8Rng, guards: &Guards, out: &mut Suite) -> Result<()> {
    for f in fields()? {
        for _ in 0..4 {
            let n = rng.gen_range(5..=8);
            let k = rng.gen_range(2..=n.min(5));
            let c = random_code(&f, n, k, rng)?;
            let d = c.min_distance(guards)?;
            let conv = unit_memory_from_block(&c, 1, None, guards)?;
            let g = conv.generator();
            out.check(is_basic(g, guards)? && is_reduced(g)?, || format!("certification of {c:?}"));
            let fd = free_distance(g, guards)?;
            let s = conv.params().s;
            out.check(d <= fd.value && fd.value <= s, || format!("{d} <= {} <= {s} fails", fd.value));
            let t = free_distance_truncated(g, fd.witness_len, guards)?;
            out.check(t == fd.value, || format!("truncated {t} vs exact {}", fd.value));
            out.check(
                generalized_singleton(conv.params().n, conv.params().k, conv.params().gamma)?.s == s,
                || "stored s".into(),
            );
        }
    }
    Ok(())
}

fn certification(rng: &mut ChaCha8Rng, guards: &Guards, out: &mut Suite) -> Result<()> {
    let f = Field::new(2, 1, None)?;
    for _ in 0..20 {
        let kappa = rng.gen_range(1..=2);
        let n = rng.gen_range(kappa..=4);
        let coeffs: Vec<Matrix> = (0..3)
            .map(|_| Matrix::from_flat(&f, kappa, n, (0..kappa * n).map(|_| rng.gen_range(0..2)).collect()))
            .collect::<Result<_>>()?;
        let g = PolyMatrix::new(coeffs)?;
        let (Ok(a), Ok(b)) = (is_basic(&g, guards), is_basic_by_smith(&g)) else {
            continue;
        };
        out.check(a == b, || format!("minor and Smith routes disagree on {:?}", g.entries()));
        if let (Ok(true), Ok(gext)) = (is_reduced(&g), g.external_degree()) {
            let gint = max_minor_degree(&g, guards)?;
            out.check(gext == gint, || format!("reduced but degrees {gext} != {gint}"));
        }
    }
    Ok(())
}

/// Runs every suite from a fixed seed.
pub fn run(seed: u64, guards: &Guards) -> Result<SelftestReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut suites = Vec::new();
    let mut s = Suite::new("field_axioms");
    field_axioms(&mut s)?;
    suites.push(s.result);
    let mut s = Suite::new("block_codes");
    block_codes(&mut rng, guards, &mut s)?;
    suites.push(s.result);
    let mut s = Suite::new("combinator_intervals");
    combinator_intervals(&mut rng, guards, &mut s)?;
    suites.push(s.result);
    let mut s = Suite::new("unit_memory");
    unit_memory(&mut rng, guards, &mut s)?;
    suites.push(s.result);
    let mut s = Suite::new("certification");
    certification(&mut rng, guards, &mut s)?;
    suites.push(s.result);
    let passed = suites.iter().map(|s| s.passed).sum();
    let failed = suites.iter().map(|s| s.failed).sum();
    Ok(SelftestReport { seed, suites, passed, failed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_is_clean_and_deterministic() {
        let a = run(7, &Guards::default()).unwrap();
        assert_eq!(a.failed, 0, "{a:?}");
        assert!(a.passed > 50);
        assert_eq!(run(7, &Guards::default()).unwrap(), a);
    }
}
