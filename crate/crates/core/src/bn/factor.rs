//! Dense table factors over variable indices.

use crate::scalar::Probability;

/// A non-negative table over a set of variables, stored row-major with the
/// last variable varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor<T> {
    vars: Vec<usize>,
    cards: Vec<usize>,
    values: Vec<T>,
}

impl<T: Probability> Factor<T> {
    pub fn new(vars: Vec<usize>, cards: Vec<usize>, values: Vec<T>) -> Self {
        debug_assert_eq!(vars.len(), cards.len());
        debug_assert_eq!(values.len(), cards.iter().product::<usize>());
        Factor { vars, cards, values }
    }

    /// The multiplicative identity: no variables, one entry equal to 1.
    pub fn unit() -> Self {
        Factor {
            vars: Vec::new(),
            cards: Vec::new(),
            values: vec![T::one()],
        }
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn contains(&self, var: usize) -> bool {
        self.vars.contains(&var)
    }

    /// The single entry of a scope-free factor.
    pub fn scalar(&self) -> Option<&T> {
        if self.vars.is_empty() {
            self.values.first()
        } else {
            None
        }
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![0; self.cards.len()];
        let mut acc = 1;
        for i in (0..self.cards.len()).rev() {
            strides[i] = acc;
            acc *= self.cards[i];
        }
        strides
    }

    pub fn product(&self, other: &Factor<T>) -> Factor<T> {
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        for (v, c) in other.vars.iter().zip(&other.cards) {
            if !vars.contains(v) {
                vars.push(*v);
                cards.push(*c);
            }
        }
        // Stride of each output position inside each input (0 when absent).
        let lhs_strides = self.strides();
        let rhs_strides = other.strides();
        let map = |src_vars: &[usize], src_strides: &[usize]| -> Vec<usize> {
            vars.iter()
                .map(|v| {
                    src_vars
                        .iter()
                        .position(|s| s == v)
                        .map(|i| src_strides[i])
                        .unwrap_or(0)
                })
                .collect()
        };
        let a_step = map(&self.vars, &lhs_strides);
        let b_step = map(&other.vars, &rhs_strides);

        let total: usize = cards.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut digits = vec![0usize; vars.len()];
        let (mut ia, mut ib) = (0usize, 0usize);
        for _ in 0..total {
            values.push(self.values[ia].clone() * other.values[ib].clone());
            for pos in (0..digits.len()).rev() {
                digits[pos] += 1;
                ia += a_step[pos];
                ib += b_step[pos];
                if digits[pos] < cards[pos] {
                    break;
                }
                ia -= a_step[pos] * cards[pos];
                ib -= b_step[pos] * cards[pos];
                digits[pos] = 0;
            }
        }
        Factor { vars, cards, values }
    }

    /// Marginalizes `var` out of the factor.
    pub fn sum_out(&self, var: usize) -> Factor<T> {
        let Some(pos) = self.vars.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let strides = self.strides();
        let (outer, inner, card) = (
            self.values.len() / (strides[pos] * self.cards[pos]),
            strides[pos],
            self.cards[pos],
        );
        let mut values = Vec::with_capacity(outer * inner);
        for o in 0..outer {
            for i in 0..inner {
                let base = o * card * inner + i;
                let mut acc = self.values[base].clone();
                for s in 1..card {
                    acc = acc + self.values[base + s * inner].clone();
                }
                values.push(acc);
            }
        }
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(pos);
        cards.remove(pos);
        Factor { vars, cards, values }
    }

    /// Fixes `var` to `state`, dropping it from the scope.
    pub fn reduce(&self, var: usize, state: usize) -> Factor<T> {
        let Some(pos) = self.vars.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let strides = self.strides();
        let (outer, inner, card) = (
            self.values.len() / (strides[pos] * self.cards[pos]),
            strides[pos],
            self.cards[pos],
        );
        let mut values = Vec::with_capacity(outer * inner);
        for o in 0..outer {
            let base = o * card * inner + state * inner;
            values.extend_from_slice(&self.values[base..base + inner]);
        }
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(pos);
        cards.remove(pos);
        Factor { vars, cards, values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_then_sum_out_matches_hand_computation() {
        // f(a) = [0.3, 0.7]; g(a, b) = [[0.9, 0.1], [0.2, 0.8]]
        let f: Factor<f64> = Factor::new(vec![0], vec![2], vec![0.3, 0.7]);
        let g: Factor<f64> = Factor::new(vec![0, 1], vec![2, 2], vec![0.9, 0.1, 0.2, 0.8]);
        let joint = f.product(&g);
        assert_eq!(joint.vars(), &[0, 1]);
        let expect = [0.27, 0.03, 0.14, 0.56];
        for (a, b) in joint.values().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let marginal_b = joint.sum_out(0);
        assert_eq!(marginal_b.vars(), &[1]);
        assert!((marginal_b.values()[0] - 0.41).abs() < 1e-15);
        assert!((marginal_b.values()[1] - 0.59).abs() < 1e-15);
    }

    #[test]
    fn product_aligns_reordered_scopes() {
        let g = Factor::new(vec![0, 1], vec![2, 3], vec![1., 2., 3., 4., 5., 6.]);
        let h = Factor::new(vec![1, 0], vec![3, 2], vec![1., 10., 100., 1000., 1e4, 1e5]);
        let p = g.product(&h);
        // entry (a=1, b=2) = g[1*3+2] * h[2*2+1] = 6 * 1e5
        assert_eq!(p.values()[5], 6.0 * 1e5);
        assert_eq!(p.values()[1], 2.0 * 100.0);
    }

    #[test]
    fn reduce_picks_a_slice() {
        let g = Factor::new(vec![0, 1], vec![2, 3], vec![1., 2., 3., 4., 5., 6.]);
        assert_eq!(g.reduce(0, 1).values(), &[4., 5., 6.]);
        assert_eq!(g.reduce(1, 2).values(), &[3., 6.]);
    }
}
