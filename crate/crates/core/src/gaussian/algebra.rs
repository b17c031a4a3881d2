//! Normal ordering of bosonic ladder-operator polynomials.

use std::collections::BTreeMap;

use num_complex::Complex64;

/// `(true, k)` is `a_k†`, `(false, k)` is `a_k`.
pub type Letter = (bool, usize);
pub type Word = Vec<Letter>;

/// Linear combination of operator words.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly {
    terms: BTreeMap<Word, Complex64>,
}

impl Poly {
    pub fn word(word: Word, coeff: Complex64) -> Self {
        let mut p = Poly::default();
        p.add_word(word, coeff);
        p
    }

    fn add_word(&mut self, word: Word, coeff: Complex64) {
        if coeff == Complex64::new(0.0, 0.0) {
            return;
        }
        *self.terms.entry(word).or_default() += coeff;
    }

    pub fn add(&mut self, other: &Poly, scale: Complex64) {
        for (w, c) in &other.terms {
            self.add_word(w.clone(), c * scale);
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::default();
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                out.add_word(w, ca * cb);
            }
        }
        out
    }

    /// Rewrites every word as creations (sorted by mode) followed by
    /// annihilations (sorted by mode) using `[a_i, a_j†] = δ_ij`.
    pub fn normal_ordered(&self) -> Poly {
        let mut pending: Vec<(Word, Complex64)> = self.terms.iter().map(|(w, c)| (w.clone(), *c)).collect();
        let mut out = Poly::default();
        while let Some((w, c)) = pending.pop() {
            match w.windows(2).position(|p| !p[0].0 && p[1].0) {
                Some(i) => {
                    let (_, m) = w[i];
                    let (_, n) = w[i + 1];
                    let mut swapped = w.clone();
                    swapped.swap(i, i + 1);
                    pending.push((swapped, c));
                    if m == n {
                        let mut contracted = w[..i].to_vec();
                        contracted.extend_from_slice(&w[i + 2..]);
                        pending.push((contracted, c));
                    }
                }
                None => {
                    let split = w.iter().take_while(|l| l.0).count();
                    let mut canonical = w.clone();
                    canonical[..split].sort();
                    canonical[split..].sort();
                    out.add_word(canonical, c);
                }
            }
        }
        out.terms.retain(|_, c| c.norm() != 0.0);
        out
    }

    pub fn terms(&self) -> &BTreeMap<Word, Complex64> {
        &self.terms
    }
}

pub fn create(k: usize) -> Poly {
    Poly::word(vec![(true, k)], Complex64::new(1.0, 0.0))
}

pub fn annihilate(k: usize) -> Poly {
    Poly::word(vec![(false, k)], Complex64::new(1.0, 0.0))
}

pub fn commutator(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.mul(b);
    out.add(&b.mul(a), Complex64::new(-1.0, 0.0));
    out
}

pub fn anticommutator(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.mul(b);
    out.add(&b.mul(a), Complex64::new(1.0, 0.0));
    out
}
