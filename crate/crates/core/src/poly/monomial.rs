use std::cmp::Ordering;

use smallvec::SmallVec;

/// Dense exponent vector with trailing zeros trimmed, so a monomial does not
/// depend on how many variables its ring has.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: SmallVec<[u32; 8]>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        let mut m = Monomial {
            exps: SmallVec::from_slice(exps),
        };
        m.trim();
        m
    }

    pub fn var(index: usize, power: u32) -> Self {
        if power == 0 {
            return Monomial::one();
        }
        let mut exps = SmallVec::from_elem(0, index + 1);
        exps[index] = power;
        Monomial { exps }
    }

    fn trim(&mut self) {
        while self.exps.last() == Some(&0) {
            self.exps.pop();
        }
    }

    #[inline]
    pub fn exp(&self, index: usize) -> u32 {
        self.exps.get(index).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    /// Number of leading exponent slots (one past the highest variable used).
    pub fn width(&self) -> usize {
        self.exps.len()
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (long, short) = if self.exps.len() >= other.exps.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut exps = long.exps.clone();
        for (e, s) in exps.iter_mut().zip(short.exps.iter()) {
            *e = e.checked_add(*s).expect("exponent overflow");
        }
        Monomial { exps }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.len() <= other.exps.len()
            && self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        debug_assert!(self.divides(other));
        let mut exps = other.exps.clone();
        for (e, s) in exps.iter_mut().zip(self.exps.iter()) {
            *e -= *s;
        }
        let mut m = Monomial { exps };
        m.trim();
        m
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        let n = self.exps.len().max(other.exps.len());
        let exps = (0..n).map(|i| self.exp(i).max(other.exp(i))).collect();
        Monomial { exps }
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exps
            .iter()
            .zip(other.exps.iter())
            .all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Bit `i` set when variable `i` occurs (first 64 variables).
    pub fn support_mask(&self) -> u64 {
        self.exps
            .iter()
            .enumerate()
            .take(64)
            .filter(|(_, e)| **e > 0)
            .fold(0, |m, (i, _)| m | (1 << i))
    }

    pub fn involves_any(&self, vars: &[usize]) -> bool {
        vars.iter().any(|&v| self.exp(v) > 0)
    }

    /// Relabel variables; `map[i]` is the new index of variable `i`.
    /// Returns `None` when a variable with positive exponent has no image.
    pub fn remap(&self, map: &[Option<usize>]) -> Option<Monomial> {
        let mut exps: SmallVec<[u32; 8]> = SmallVec::new();
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let j = (*map.get(i)?)?;
            if exps.len() <= j {
                exps.resize(j + 1, 0);
            }
            exps[j] += e;
        }
        let mut m = Monomial { exps };
        m.trim();
        Some(m)
    }

    pub(crate) fn lex_cmp(&self, other: &Monomial) -> Ordering {
        self.exps.cmp(&other.exps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trimming_makes_width_independent() {
        assert_eq!(Monomial::from_exponents(&[1, 0, 0]), Monomial::var(0, 1));
        assert!(Monomial::from_exponents(&[0, 0]).is_one());
    }

    #[test]
    fn divide_and_lcm() {
        let a = Monomial::from_exponents(&[2, 1]);
        let b = Monomial::from_exponents(&[1, 0, 3]);
        let l = a.lcm(&b);
        assert_eq!(l.exponents(), &[2, 1, 3]);
        assert!(a.divides(&l) && b.divides(&l));
        assert_eq!(a.quotient_of(&l).exponents(), &[0, 0, 3]);
        assert!(!a.is_coprime(&b));
        assert!(Monomial::var(1, 2).is_coprime(&Monomial::var(0, 5)));
    }

    #[test]
    fn remap_drops_nothing_silently() {
        let m = Monomial::from_exponents(&[1, 0, 2]);
        let mapped = m.remap(&[Some(0), None, Some(1)]).unwrap();
        assert_eq!(mapped.exponents(), &[1, 2]);
        assert!(m.remap(&[Some(0), Some(1), None]).is_none());
    }
}
