//! Exact rational helpers shared by the geometry code.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{PolyError, Result};

/// Exact rational scalar used for vertices and lattice points.
pub type Q = Ratio<i64>;

/// Parses `"p/q"`, `"p"` or `"-p/q"` (surrounding whitespace allowed).
pub fn parse_q(s: &str) -> Result<Q> {
    let t = s.trim();
    let bad = || PolyError::NonRationalVertex(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => t.parse::<i64>().map(Q::from_integer).map_err(|_| bad()),
    }
}

/// Formats a rational as `"p/q"`, or `"p"` when integral.
pub fn fmt_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or_else(|| *q.numer() as f64 / *q.denom() as f64)
}

pub fn to_f64_vec(v: &[Q]) -> Vec<f64> {
    v.iter().map(q_to_f64).collect()
}

pub fn qi(i: i64) -> Q {
    Q::from_integer(i)
}

pub fn floor_q(q: &Q) -> i64 {
    q.floor().to_integer()
}

pub fn ceil_q(q: &Q) -> i64 {
    q.ceil().to_integer()
}

pub fn dot_q(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn sub_q(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Largest positive rational `s` such that every entry of `vs` is an integer multiple of `s`.
/// Returns zero when all entries vanish.
pub fn rational_content<'a>(vs: impl IntoIterator<Item = &'a Q>) -> Q {
    let mut num = 0i64;
    let mut den = 1i64;
    for q in vs {
        if q.is_zero() {
            continue;
        }
        num = num.gcd(q.numer());
        den = den.lcm(q.denom());
    }
    if num == 0 {
        Q::zero()
    } else {
        Q::new(num.abs(), den)
    }
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c];
                for j in 0..cols {
                    let v = m[r][j];
                    m[i][j] -= f * v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(vectors: &[Vec<Q>]) -> usize {
    let mut m = vectors.to_vec();
    rref(&mut m).len()
}

/// Solves the square system `a x = b`; `None` when singular.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.len();
    let mut aug: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() != n || piv.iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n]).collect())
}

/// Inverse of a square matrix; `None` when singular.
pub fn inverse(a: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = a.len();
    let mut aug: Vec<Vec<Q>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { qi(1) } else { Q::zero() }));
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() != n || piv.iter().enumerate().any(|(i, &c)| c != i) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn det(a: &[Vec<Q>]) -> Q {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = qi(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c];
        for i in c + 1..n {
            let f = m[i][c] / m[c][c];
            if f.is_zero() {
                continue;
            }
            for j in c..n {
                let v = m[c][j];
                m[i][j] -= f * v;
            }
        }
    }
    d
}

/// Basis of the rational null space `{y : m y = 0}`, scaled to primitive integer vectors.
pub fn integer_nullspace(m: &[Vec<Q>], cols: usize) -> Vec<Vec<i64>> {
    let mut r = m.to_vec();
    let pivots = rref(&mut r);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = qi(1);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[row][f];
            }
            primitive(&v)
        })
        .collect()
}

/// Scales a rational vector to a primitive integer vector with the same direction.
pub fn primitive(v: &[Q]) -> Vec<i64> {
    let den = v.iter().fold(1i64, |acc, q| acc.lcm(q.denom()));
    let ints: Vec<i64> = v.iter().map(|q| (q * den).to_integer()).collect();
    let g = ints.iter().fold(0i64, |acc, x| acc.gcd(x));
    if g == 0 {
        ints
    } else {
        ints.iter().map(|x| x / g).collect()
    }
}

/// Z-basis of the integer kernel `{y ∈ Z^d : c y = 0}` by unimodular column reduction.
pub fn integer_kernel(c: &[Vec<i64>], d: usize) -> Vec<Vec<i64>> {
    let mut a: Vec<Vec<i128>> = c.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut u: Vec<Vec<i128>> = (0..d)
        .map(|i| (0..d).map(|j| i128::from(i == j)).collect())
        .collect();
    let col_axpy = |m: &mut Vec<Vec<i128>>, dst: usize, src: usize, q: i128| {
        for row in m.iter_mut() {
            row[dst] -= q * row[src];
        }
    };
    let col_swap = |m: &mut Vec<Vec<i128>>, x: usize, y: usize| {
        for row in m.iter_mut() {
            row.swap(x, y);
        }
    };
    let mut p = 0;
    for row in 0..a.len() {
        if p == d {
            break;
        }
        for j in p + 1..d {
            while a[row][j] != 0 {
                let q = a[row][p].div_euclid(a[row][j]);
                col_axpy(&mut a, p, j, q);
                col_axpy(&mut u, p, j, q);
                col_swap(&mut a, p, j);
                col_swap(&mut u, p, j);
            }
        }
        if a[row][p] != 0 {
            p += 1;
        }
    }
    (p..d)
        .map(|col| (0..d).map(|i| u[i][col] as i64).collect())
        .collect()
}

/// Serde adapters writing rationals as `"p/q"` strings.
pub mod serde_q {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use super::{fmt_q, parse_q, Q};

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(fmt_q))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
            let raw = Vec::<String>::deserialize(d)?;
            raw.iter().map(|x| parse_q(x).map_err(D::Error::custom)).collect()
        }
    }

    pub mod vec2 {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Vec<Q>], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|p| p.iter().map(fmt_q).collect::<Vec<_>>()))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Q>>, D::Error> {
            let raw = Vec::<Vec<String>>::deserialize(d)?;
            raw.iter()
                .map(|p| p.iter().map(|x| parse_q(x).map_err(D::Error::custom)).collect())
                .collect()
        }
    }
}
