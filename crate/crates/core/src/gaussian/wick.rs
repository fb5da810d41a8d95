use std::collections::HashMap;

use num_complex::Complex64;

use super::map::LinearMap;
use super::polynomial::{Ladder, Monomial, OperatorPolynomial};
use super::scene::GaussianScene;
use crate::error::{Error, Result};

/// Highest monomial degree accepted by [`wick_expectation`] (`4m + 4` at `m = 4`).
pub const MAX_DEGREE: usize = 20;

const PRUNE: f64 = 1e-300;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Vacuum expectation of `poly` after replacing each ladder operator by its
/// linear image in `scene`.
pub fn wick_expectation(scene: &GaussianScene, poly: &OperatorPolynomial) -> Result<Complex64> {
    let mut total = ZERO;
    for term in poly.terms() {
        total += monomial_expectation(scene, term)?;
    }
    Ok(total)
}

fn monomial_expectation(scene: &GaussianScene, term: &Monomial) -> Result<Complex64> {
    let n = term.factors.len();
    if n > MAX_DEGREE {
        return Err(Error::DegreeOverflow {
            degree: n,
            max: MAX_DEGREE,
        });
    }
    if term.coeff.norm() <= PRUNE {
        return Ok(ZERO);
    }
    let mut forms: Vec<LinearMap> = Vec::with_capacity(n);
    for &(mode, ladder) in &term.factors {
        let map = scene.map(mode)?;
        forms.push(match ladder {
            Ladder::Annihilate => map.clone(),
            Ladder::Create => map.adjoint(),
        });
    }
    let shifts: Vec<Complex64> = forms.iter().map(LinearMap::displacement).collect();
    // <0| F_i F_j |0> for i < j: only a_k a_k^dagger survives.
    let mut pair = vec![ZERO; n * n];
    for i in 0..n {
        for j in i + 1..n {
            pair[i * n + j] = forms[i]
                .coefficients()
                .iter()
                .zip(forms[j].coefficients())
                .map(|((u, _), (_, v))| u * v)
                .sum();
        }
    }
    let mut pairing = Pairing {
        n,
        shifts: &shifts,
        pair: &pair,
        memo: HashMap::new(),
    };
    let full = if n == 0 { 0 } else { (1u32 << n) - 1 };
    Ok(term.coeff * pairing.eval(full))
}

struct Pairing<'a> {
    n: usize,
    shifts: &'a [Complex64],
    pair: &'a [Complex64],
    memo: HashMap<u32, Complex64>,
}

impl Pairing<'_> {
    // Expectation of the ordered product of the factors left in `mask`.
    // The lowest remaining factor either contributes its displacement or
    // contracts with a later remaining factor.
    fn eval(&mut self, mask: u32) -> Complex64 {
        if mask == 0 {
            return Complex64::new(1.0, 0.0);
        }
        if let Some(&v) = self.memo.get(&mask) {
            return v;
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut value = ZERO;
        let d = self.shifts[i];
        if d.norm() > PRUNE {
            value += d * self.eval(rest);
        }
        let mut later = rest;
        while later != 0 {
            let j = later.trailing_zeros() as usize;
            later &= !(1 << j);
            let c = self.pair[i * self.n + j];
            if c.norm() > PRUNE {
                value += c * self.eval(rest & !(1 << j));
            }
        }
        self.memo.insert(mask, value);
        value
    }
}

/// Convenience for real-valued observables: the real part of the expectation.
pub fn real_expectation(scene: &GaussianScene, poly: &OperatorPolynomial) -> Result<f64> {
    Ok(wick_expectation(scene, poly)?.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::map::ModeLabel;

    const A: ModeLabel = ModeLabel::SIGNAL;

    #[test]
    fn identity_is_one() {
        let v = wick_expectation(&GaussianScene::vacuum(), &OperatorPolynomial::identity()).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn squeezed_vacuum_number() {
        let s = GaussianScene::vacuum().apply_squeeze(1.0, 0.0).unwrap();
        let n = real_expectation(&s, &OperatorPolynomial::number(A)).unwrap();
        assert!((n - 1f64.sinh().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn coherent_factorial_moment() {
        let s = GaussianScene::vacuum().apply_displacement(1.7, 0.0);
        let v = real_expectation(&s, &OperatorPolynomial::normal_power(A, 2, 2)).unwrap();
        assert!((v - 1.7f64.powi(4)).abs() < 1e-12);
    }

    #[test]
    fn momentum_fourth_moment() {
        let r: f64 = 0.6;
        let s = GaussianScene::vacuum().apply_squeeze(r, 0.0).unwrap();
        let p4 = OperatorPolynomial::momentum(A).pow(4);
        let v = wick_expectation(&s, &p4).unwrap();
        assert!((v.re - 0.75 * (-4.0 * r).exp()).abs() < 1e-14);
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn rejects_large_degree_and_unknown_mode() {
        let s = GaussianScene::vacuum();
        let big = OperatorPolynomial::normal_power(A, 11, 10);
        assert!(matches!(wick_expectation(&s, &big), Err(Error::DegreeOverflow { .. })));
        let other = OperatorPolynomial::number(ModeLabel(3));
        assert!(matches!(wick_expectation(&s, &other), Err(Error::UnknownMode { .. })));
    }
}
