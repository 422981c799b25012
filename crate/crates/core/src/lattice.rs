//! Exact linear solvers: rational elimination and integer diagonalization.
//!
//! The integer path reduces a matrix to diagonal form by unimodular row and
//! column operations (Smith-style reduction without the divisor chain, which
//! solving does not need). This answers "is b in the column span over Z,
//! over Z[1/m], over Q" exactly and produces kernel bases for bounded
//! enumeration.

use crate::rat::{strip_m_part, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type IMat = Vec<Vec<BigInt>>;

fn identity(n: usize) -> IMat {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect()
}

/// Unimodular U (rows x rows), V (cols x cols) and diagonal D with U*A*V = D.
pub struct Diagonalized {
    pub u: IMat,
    pub v: IMat,
    pub diag: Vec<BigInt>,
    pub rows: usize,
    pub cols: usize,
}

pub fn diagonalize(a: &IMat) -> Diagonalized {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m = a.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);

    let mut t = 0;
    while t < rows && t < cols {
        // pivot: entry of least nonzero absolute value in the submatrix
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !m[i][j].is_zero()
                    && pivot
                        .map(|(pi, pj)| m[i][j].abs() < m[pi][pj].abs())
                        .unwrap_or(true)
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        m.swap(t, pi);
        u.swap(t, pi);
        for row in m.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }

        // clear row and column t; a reduction can reintroduce entries, so loop
        let mut dirty = true;
        while dirty {
            dirty = false;
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = &m[i][t] / &m[t][t];
                if !q.is_zero() {
                    for j in 0..cols {
                        let s = &m[t][j] * &q;
                        m[i][j] -= s;
                    }
                    for j in 0..rows {
                        let s = &u[t][j] * &q;
                        u[i][j] -= s;
                    }
                }
                if !m[i][t].is_zero() {
                    // remainder is smaller than the pivot: swap up and retry
                    m.swap(t, i);
                    u.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = &m[t][j] / &m[t][t];
                if !q.is_zero() {
                    for i in 0..rows {
                        let s = &m[i][t] * &q;
                        m[i][j] -= s;
                    }
                    for i in 0..cols {
                        let s = &v[i][t] * &q;
                        v[i][j] -= s;
                    }
                }
                if !m[t][j].is_zero() {
                    for row in m.iter_mut() {
                        row.swap(t, j);
                    }
                    for row in v.iter_mut() {
                        row.swap(t, j);
                    }
                    dirty = true;
                }
            }
        }
        t += 1;
    }

    let diag = (0..rows.min(cols)).map(|i| m[i][i].clone()).collect();
    Diagonalized {
        u,
        v,
        diag,
        rows,
        cols,
    }
}

fn mat_vec(m: &IMat, x: &[BigInt]) -> Vec<BigInt> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// Scalar rings an integer linear system can be solved over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveRing {
    Integers,
    /// Z[1/m]: primes dividing m become invertible.
    IntegersInverting(BigInt),
    Rationals,
}

/// Solution of A x = b over the requested ring.
pub struct LatticeSolution {
    /// One solution, as rationals (integral over Z, m-power denominators over Z[1/m]).
    pub particular: Vec<Rat>,
    /// Integer kernel basis of A; over Z and Z[1/m] every solution is
    /// particular + integer (resp. Z[1/m]) combinations of these.
    pub kernel: Vec<Vec<BigInt>>,
}

/// Solve A x = b for x over the given ring. A and b have integer entries.
pub fn solve(a: &IMat, b: &[BigInt], ring: &SolveRing) -> Option<LatticeSolution> {
    let d = diagonalize(a);
    let c = mat_vec(&d.u, b);
    let rank = d.diag.iter().take_while(|x| !x.is_zero()).count();
    for (i, ci) in c.iter().enumerate() {
        if i >= rank && !ci.is_zero() {
            return None;
        }
    }
    let mut y: Vec<Rat> = vec![Rat::zero(); d.cols];
    for i in 0..rank {
        let di = &d.diag[i];
        match ring {
            SolveRing::Integers => {
                if !(&c[i] % di).is_zero() {
                    return None;
                }
            }
            SolveRing::IntegersInverting(m) => {
                // di divides c[i] in Z[1/m] iff the m-free part of di divides c[i]
                let core = strip_m_part(di, m);
                if !(&c[i] % &core).is_zero() {
                    return None;
                }
            }
            SolveRing::Rationals => {}
        }
        y[i] = Rat::new(c[i].clone(), di.clone());
    }
    // x = V y
    let particular = (0..d.cols)
        .map(|i| {
            (0..d.cols)
                .map(|k| Rat::from_integer(d.v[i][k].clone()) * &y[k])
                .sum()
        })
        .collect();
    let kernel = (rank..d.cols)
        .map(|k| (0..d.cols).map(|i| d.v[i][k].clone()).collect())
        .collect();
    Some(LatticeSolution { particular, kernel })
}

/// Clear denominators of a rational system, yielding integer A and b.
pub fn clear_denominators(a: &[Vec<Rat>], b: &[Rat]) -> (IMat, Vec<BigInt>) {
    use num_integer::Integer;
    let mut ai = Vec::with_capacity(a.len());
    let mut bi = Vec::with_capacity(b.len());
    for (row, rhs) in a.iter().zip(b) {
        let mut l = rhs.denom().clone();
        for x in row {
            l = l.lcm(x.denom());
        }
        ai.push(
            row.iter()
                .map(|x| x.numer() * (&l / x.denom()))
                .collect::<Vec<_>>(),
        );
        bi.push(rhs.numer() * (&l / rhs.denom()));
    }
    (ai, bi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;

    fn b(n: i64) -> BigInt {
        BigInt::from(n)
    }

    fn check_uav(a: &IMat) {
        let d = diagonalize(a);
        let rows = d.rows;
        let cols = d.cols;
        // compute U*A*V and compare with diag
        let mut ua = vec![vec![BigInt::zero(); cols]; rows];
        for i in 0..rows {
            for j in 0..cols {
                for k in 0..rows {
                    let s = &d.u[i][k] * &a[k][j];
                    ua[i][j] += s;
                }
            }
        }
        let mut uav = vec![vec![BigInt::zero(); cols]; rows];
        for i in 0..rows {
            for j in 0..cols {
                for k in 0..cols {
                    let s = &ua[i][k] * &d.v[k][j];
                    uav[i][j] += s;
                }
            }
        }
        for i in 0..rows {
            for j in 0..cols {
                let expect = if i == j && i < d.diag.len() {
                    d.diag[i].clone()
                } else {
                    BigInt::zero()
                };
                assert_eq!(uav[i][j], expect, "at ({i},{j})");
            }
        }
    }

    #[test]
    fn diagonalization_is_uav() {
        let cases: Vec<IMat> = vec![
            vec![vec![b(2), b(4)], vec![b(6), b(8)]],
            vec![vec![b(0), b(0)], vec![b(0), b(0)]],
            vec![vec![b(3)], vec![b(5)]],
            vec![vec![b(6), b(10), b(15)]],
            vec![
                vec![b(2), b(3), b(5)],
                vec![b(7), b(11), b(13)],
                vec![b(17), b(19), b(23)],
            ],
        ];
        for a in &cases {
            check_uav(a);
        }
    }

    #[test]
    fn integer_solve_examples() {
        // 2x + 4y = 6 has integer solutions
        let a = vec![vec![b(2), b(4)]];
        let s = solve(&a, &[b(6)], &SolveRing::Integers).unwrap();
        let x = &s.particular;
        assert_eq!(rat_int(2) * &x[0] + rat_int(4) * &x[1], rat_int(6));
        assert_eq!(s.kernel.len(), 1);

        // 2x = 3 has none over Z, one over Z[1/2], one over Q
        let a = vec![vec![b(2)]];
        assert!(solve(&a, &[b(3)], &SolveRing::Integers).is_none());
        let s = solve(&a, &[b(3)], &SolveRing::IntegersInverting(b(2))).unwrap();
        assert_eq!(s.particular[0], Rat::new(b(3), b(2)));
        assert!(solve(&a, &[b(3)], &SolveRing::Rationals).is_some());

        // 4x = 9 over Z[1/2]: the odd part of 4 is 1, so solvable
        let a = vec![vec![b(4)]];
        let s = solve(&a, &[b(9)], &SolveRing::IntegersInverting(b(2))).unwrap();
        assert_eq!(s.particular[0], Rat::new(b(9), b(4)));
        // 6x = 9 over Z[1/2] works (9/6 = 3/2), 6x = 5 does not (3 stays prime)
        let a = vec![vec![b(6)]];
        assert!(solve(&a, &[b(9)], &SolveRing::IntegersInverting(b(2))).is_some());
        assert!(solve(&a, &[b(5)], &SolveRing::IntegersInverting(b(2))).is_none());

        // inconsistent: x = 1, x = 2
        let a = vec![vec![b(1)], vec![b(1)]];
        assert!(solve(&a, &[b(1), b(2)], &SolveRing::Rationals).is_none());
    }

    #[test]
    fn kernel_spans_solutions() {
        // x + y + z = 0 over Z: kernel rank 2
        let a = vec![vec![b(1), b(1), b(1)]];
        let s = solve(&a, &[b(0)], &SolveRing::Integers).unwrap();
        assert_eq!(s.kernel.len(), 2);
        for k in &s.kernel {
            assert_eq!(&k[0] + &k[1] + &k[2], b(0));
        }
    }
}
