//! Hall basis of the free nilpotent Lie algebra and bracket rewriting.
//!
//! Basic commutators in Marshall Hall's convention: the basis is ordered by
//! degree, and within a degree by order of generation. A pair `(u, v)` of
//! basis words is admissible when `u > v` and, if `u = (x, y)`, also
//! `y <= v`. Its bracket is `[u, v]`, so `X21 = [X2, X1]`,
//! `X211 = [X21, X1]`, and so on.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// A basis word: a generator, or an admissible bracket of two earlier
/// basis words (given by their basis indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HallWord {
    Generator(usize),
    Bracket(usize, usize),
}

fn mobius(mut n: usize) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Dimension of the degree-`n` component of the free Lie algebra on `r`
/// generators, `(1/n) Σ_{d|n} μ(d) r^{n/d}`. `None` on overflow.
pub fn witt_dimension(r: usize, n: usize) -> Option<u128> {
    if n == 0 {
        return Some(0);
    }
    let mut sum: i128 = 0;
    for d in 1..=n {
        if !n.is_multiple_of(d) {
            continue;
        }
        let mu = mobius(d) as i128;
        if mu == 0 {
            continue;
        }
        let p = (r as i128).checked_pow((n / d) as u32)?;
        sum = sum.checked_add(mu.checked_mul(p)?)?;
    }
    Some((sum / n as i128) as u128)
}

/// Words of the Hall basis up to a given degree.
#[derive(Clone, Debug)]
pub(crate) struct HallSet {
    pub words: Vec<HallWord>,
    pub degrees: Vec<usize>,
    index: HashMap<(usize, usize), usize>,
}

impl HallSet {
    pub fn enumerate(rank: usize, step: usize) -> Self {
        let mut words: Vec<HallWord> = (0..rank).map(HallWord::Generator).collect();
        let mut degrees = vec![1; rank];
        let mut index = HashMap::new();
        for n in 2..=step {
            let existing = words.len();
            for u in 0..existing {
                let du = degrees[u];
                if du >= n {
                    continue;
                }
                for v in 0..u {
                    if du + degrees[v] != n {
                        continue;
                    }
                    let admissible = match words[u] {
                        HallWord::Generator(_) => true,
                        HallWord::Bracket(_, y) => y <= v,
                    };
                    if admissible {
                        index.insert((u, v), words.len());
                        words.push(HallWord::Bracket(u, v));
                        degrees.push(n);
                    }
                }
            }
        }
        Self {
            words,
            degrees,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    /// Human-readable labels. With at most nine generators, left-normed
    /// words concatenate digits (`X2112`); other words use a bracketed form
    /// such as `X[211,21]`.
    pub fn labels(&self, rank: usize) -> Vec<String> {
        let mut inner: Vec<String> = Vec::with_capacity(self.words.len());
        let mut left_normed: Vec<bool> = Vec::with_capacity(self.words.len());
        let digits = rank <= 9;
        for w in &self.words {
            match *w {
                HallWord::Generator(g) => {
                    inner.push(format!("{}", g + 1));
                    left_normed.push(true);
                }
                HallWord::Bracket(u, v) => {
                    let generator_right = matches!(self.words[v], HallWord::Generator(_));
                    if digits && left_normed[u] && generator_right {
                        inner.push(format!("{}{}", inner[u], inner[v]));
                        left_normed.push(true);
                    } else {
                        inner.push(format!("[{},{}]", inner[u], inner[v]));
                        left_normed.push(false);
                    }
                }
            }
        }
        if digits {
            inner.into_iter().map(|s| format!("X{s}")).collect()
        } else {
            // Multi-digit generator indices would make concatenation ambiguous.
            self.words
                .iter()
                .enumerate()
                .map(|(i, w)| match w {
                    HallWord::Generator(g) => format!("X{}", g + 1),
                    HallWord::Bracket(..) => format!("X{}", inner[i]),
                })
                .collect()
        }
    }

    /// Structure constants in the Hall basis, truncated at `step`.
    /// Entry `i * dim + j` lists `(k, c_ij^k)`.
    pub fn structure_table(&self, step: usize) -> Vec<Vec<(usize, Scalar)>> {
        let dim = self.len();
        let mut rw = Rewriter {
            set: self,
            step,
            memo: HashMap::new(),
        };
        let mut table = vec![Vec::new(); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                if i != j && self.degrees[i] + self.degrees[j] <= step {
                    table[i * dim + j] = rw.bracket(i, j);
                }
            }
        }
        table
    }
}

struct Rewriter<'a> {
    set: &'a HallSet,
    step: usize,
    memo: HashMap<(usize, usize), Vec<(usize, Scalar)>>,
}

impl Rewriter<'_> {
    /// `[e_a, e_b]` expanded in the Hall basis.
    fn bracket(&mut self, a: usize, b: usize) -> Vec<(usize, Scalar)> {
        if a == b || self.set.degrees[a] + self.set.degrees[b] > self.step {
            return Vec::new();
        }
        if let Some(v) = self.memo.get(&(a, b)) {
            return v.clone();
        }
        let result = if a < b {
            self.bracket(b, a)
                .into_iter()
                .map(|(k, c)| (k, -c))
                .collect()
        } else if let Some(&k) = self.set.index.get(&(a, b)) {
            vec![(k, Scalar::one())]
        } else {
            // Not admissible, so a = (x, y) with y > b. Jacobi gives
            // [[x,y],b] = [[x,b],y] + [x,[y,b]].
            let HallWord::Bracket(x, y) = self.set.words[a] else {
                unreachable!("generator paired with a smaller word is admissible")
            };
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (k, c) in self.bracket(x, b) {
                for (m, d) in self.bracket(k, y) {
                    *acc.entry(m).or_insert_with(Scalar::zero) += &c * &d;
                }
            }
            for (k, c) in self.bracket(y, b) {
                for (m, d) in self.bracket(x, k) {
                    *acc.entry(m).or_insert_with(Scalar::zero) += &c * &d;
                }
            }
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
        };
        self.memo.insert((a, b), result.clone());
        result
    }
}
