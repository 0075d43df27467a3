//! Moment engine: expands powers of `N1 = b1+ b1` into ladder-operator
//! monomials over the six input modes and evaluates each monomial exactly on a
//! product input state. Assumes canonical `[a, a+] = 1` in every mode.

use num_complex::Complex64;

use crate::interferometer::{SeedState, TransferCoefficients};

/// One ladder operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ladder {
    /// Input mode in the order `a1, a2, l1, l2, d1, d2`.
    pub mode: usize,
    pub create: bool,
}

impl Ladder {
    fn adjoint(self) -> Self {
        Self {
            create: !self.create,
            ..self
        }
    }
}

/// Sum of `coefficient * (ordered operator product)` terms, unsimplified.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialExpansion {
    pub terms: Vec<(Complex64, Vec<Ladder>)>,
}

impl MonomialExpansion {
    /// `b1` from the row-1 coefficients over `(a1, a2+, l1, l2+, d1, d2+)`.
    pub fn output_mode(row: &[Complex64; 6]) -> Self {
        let terms = row
            .iter()
            .enumerate()
            .map(|(j, &c)| (c, vec![Ladder { mode: j, create: j % 2 == 1 }]))
            .collect();
        Self { terms }
    }

    pub fn adjoint(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(c, word)| (c.conj(), word.iter().rev().map(|l| l.adjoint()).collect()))
            .collect();
        Self { terms }
    }

    /// Operator product `self * other`; term count is the product of the counts.
    pub fn product(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (c1, w1) in &self.terms {
            for (c2, w2) in &other.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                terms.push((c1 * c2, w));
            }
        }
        Self { terms }
    }

    /// Expectation value on the product state `states[mode]`.
    pub fn expectation(&self, states: &[SeedState; 6]) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for (c, word) in &self.terms {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut value = *c;
            for (mode, state) in states.iter().enumerate() {
                let ops: Vec<bool> = word.iter().filter(|l| l.mode == mode).map(|l| l.create).collect();
                if ops.is_empty() {
                    continue;
                }
                value *= normal_ordered(&ops)
                    .iter()
                    .map(|&(p, q, k)| single_mode_moment(state, p, q) * k)
                    .sum::<Complex64>();
            }
            total += value;
        }
        total
    }
}

/// Normal-ordered form `sum k (a+)^p a^q` of a single-mode word, built by right
/// multiplication: `(a+)^p a^q a+ = (a+)^(p+1) a^q + q (a+)^p a^(q-1)`.
fn normal_ordered(word: &[bool]) -> Vec<(u32, u32, f64)> {
    let mut poly = vec![(0u32, 0u32, 1.0)];
    for &create in word {
        let mut next: Vec<(u32, u32, f64)> = Vec::with_capacity(2 * poly.len());
        for &(p, q, k) in &poly {
            if create {
                next.push((p + 1, q, k));
                if q > 0 {
                    next.push((p, q - 1, k * q as f64));
                }
            } else {
                next.push((p, q + 1, k));
            }
        }
        next.sort_by_key(|&(p, q, _)| (p, q));
        poly.clear();
        for (p, q, k) in next {
            match poly.last_mut() {
                Some(last) if last.0 == p && last.1 == q => last.2 += k,
                _ => poly.push((p, q, k)),
            }
        }
    }
    poly
}

/// `<(a+)^p a^q>` on a single-mode state.
fn single_mode_moment(state: &SeedState, p: u32, q: u32) -> Complex64 {
    match *state {
        SeedState::Vacuum => Complex64::new(if p == 0 && q == 0 { 1.0 } else { 0.0 }, 0.0),
        SeedState::Number(n) => {
            if p != q || p > n {
                return Complex64::new(0.0, 0.0);
            }
            let falling: f64 = (0..p).map(|i| (n - i) as f64).product();
            Complex64::new(falling, 0.0)
        }
        SeedState::Coherent(mu) => mu.conj().powu(p) * mu.powu(q),
    }
}

/// `<N1^power>` for seeds in `a1` and `a2` (ancillas in vacuum), with no truncation.
pub fn moment_expectation(transfer: &TransferCoefficients, seed_a1: &SeedState, seed_a2: &SeedState, power: u32) -> f64 {
    let b1 = MonomialExpansion::output_mode(&transfer.row1());
    let n1 = b1.adjoint().product(&b1);
    let mut op = MonomialExpansion {
        terms: vec![(Complex64::new(1.0, 0.0), Vec::new())],
    };
    for _ in 0..power {
        op = op.product(&n1);
    }
    let states = [
        *seed_a1,
        *seed_a2,
        SeedState::Vacuum,
        SeedState::Vacuum,
        SeedState::Vacuum,
        SeedState::Vacuum,
    ];
    op.expectation(&states).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interferometer::{build_transfer, coefficient_moduli, InterferometerConfig};
    use crate::oracle::relative_deviation;

    fn figure_point(phi: f64) -> InterferometerConfig {
        InterferometerConfig::balanced(1e-3, 0.6, 0.4, 0.3, 1.0).unwrap().at_phase(phi)
    }

    #[test]
    fn normal_ordering_of_small_words() {
        // a a+ = a+ a + 1
        assert_eq!(normal_ordered(&[false, true]), vec![(0, 0, 1.0), (1, 1, 1.0)]);
        // a a a+ a+ = a+^2 a^2 + 4 a+ a + 2
        assert_eq!(normal_ordered(&[false, false, true, true]), vec![(0, 0, 2.0), (1, 1, 4.0), (2, 2, 1.0)]);
    }

    #[test]
    fn term_count_is_product() {
        let b1 = MonomialExpansion::output_mode(&build_transfer(&figure_point(0.0)).row1());
        let n1 = b1.adjoint().product(&b1);
        assert_eq!(n1.terms.len(), 36);
        assert_eq!(n1.product(&n1).terms.len(), 1296);
    }

    #[test]
    fn vacuum_mean() {
        let t = build_transfer(&figure_point(0.4));
        let want = t.alpha1.norm_sqr() + t.beta1.norm_sqr();
        let got = moment_expectation(&t, &SeedState::Vacuum, &SeedState::Vacuum, 1);
        assert!(relative_deviation(got, want) < 1e-14);
    }

    #[test]
    fn number_seed_mean() {
        let t = build_transfer(&figure_point(1.0));
        let want = 8.0 * t.alpha1.norm_sqr() + t.beta1.norm_sqr();
        let got = moment_expectation(&t, &SeedState::Vacuum, &SeedState::Number(7), 1);
        assert!(relative_deviation(got, want) < 1e-13);
    }

    #[test]
    fn second_moment_term_by_term() {
        // <N1^2> for |0>|m> written out by hand from the row coefficients
        let m = 2.0;
        let c = coefficient_moduli(&figure_point(0.9), 0.9);
        let (a, al, b, be) = (c.a1_sq, c.alpha1_sq, c.b1_sq, c.beta1_sq);
        let mean = (m + 1.0) * al + be;
        let vac = 1.0 - 0.3;
        let var = al * (m + 1.0) * (a + b + vac) + be * (a + m * al + b + vac);
        let t = build_transfer(&figure_point(0.9));
        let got = moment_expectation(&t, &SeedState::Vacuum, &SeedState::Number(2), 2);
        assert!(relative_deviation(got, var + mean * mean) < 1e-12);
    }

    #[test]
    fn coherent_moments() {
        assert_eq!(single_mode_moment(&SeedState::Coherent(Complex64::new(0.0, 2.0)), 1, 1), Complex64::new(4.0, 0.0));
        assert_eq!(single_mode_moment(&SeedState::Number(3), 2, 2), Complex64::new(6.0, 0.0));
        assert_eq!(single_mode_moment(&SeedState::Number(3), 4, 4), Complex64::new(0.0, 0.0));
        assert_eq!(single_mode_moment(&SeedState::Number(3), 1, 2), Complex64::new(0.0, 0.0));
    }
}
