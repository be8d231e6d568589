//! Exact integer-lattice algebra over Z^m.
//!
//! A [`Lattice`] is a subgroup of Z^m held in a canonical column-style
//! Hermite normal form, so structural equality of values coincides with
//! equality of subgroups. All fiber-subgroup computations in the rest of
//! the crate reduce to the operations in this module.
//!
//! Canonical form: basis vectors are the columns of an m x r matrix whose
//! pivot rows are strictly increasing, pivots are positive, and in each
//! pivot row the entries of earlier columns are reduced into [0, pivot).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// A sublattice of Z^m in canonical column-HNF form. The zero lattice is
/// the empty basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Lattice {
    ambient: usize,
    /// ambient x rank matrix; columns are the canonical basis.
    basis: IntMatrix,
}

/// Finite or infinite index of a sublattice.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Index {
    Finite(BigInt),
    Infinite,
}

/// Column HNF of `a` together with a unimodular `u` such that `a * u = h`.
/// Columns of `h` beyond the rank are zero; the corresponding columns of
/// `u` form a basis of the integer kernel of `a`.
pub fn hnf_with_transform(a: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let m = a.rows();
    let n = a.cols();
    let mut h = a.clone();
    let mut u = IntMatrix::identity(n);
    let mut r = 0usize; // next pivot column

    let add_col = |mat: &mut IntMatrix, dst: usize, src: usize, q: &BigInt| {
        for i in 0..mat.rows() {
            let t = q * &mat[(i, src)];
            mat[(i, dst)] -= t;
        }
    };
    let swap_col = |mat: &mut IntMatrix, x: usize, y: usize| {
        if x == y {
            return;
        }
        for i in 0..mat.rows() {
            let tmp = mat[(i, x)].clone();
            mat[(i, x)] = mat[(i, y)].clone();
            mat[(i, y)] = tmp;
        }
    };
    let negate_col = |mat: &mut IntMatrix, x: usize| {
        for i in 0..mat.rows() {
            let t = -mat[(i, x)].clone();
            mat[(i, x)] = t;
        }
    };

    for i in 0..m {
        if r == n {
            break;
        }
        // Euclidean descent on row i over columns r..n until at most one
        // nonzero entry remains, parked at column r.
        loop {
            let mut jmin: Option<usize> = None;
            for j in r..n {
                if !h[(i, j)].is_zero() {
                    jmin = match jmin {
                        Some(k) if h[(i, k)].abs() <= h[(i, j)].abs() => Some(k),
                        _ => Some(j),
                    };
                }
            }
            let Some(jmin) = jmin else { break };
            swap_col(&mut h, r, jmin);
            swap_col(&mut u, r, jmin);
            let mut others = false;
            for j in r + 1..n {
                if !h[(i, j)].is_zero() {
                    let q = &h[(i, j)] / &h[(i, r)]; // truncated quotient
                    if !q.is_zero() {
                        add_col(&mut h, j, r, &q);
                        add_col(&mut u, j, r, &q);
                    }
                    if !h[(i, j)].is_zero() {
                        others = true;
                    }
                }
            }
            if !others {
                break;
            }
        }
        if h[(i, r)].is_zero() {
            continue;
        }
        if h[(i, r)].is_negative() {
            negate_col(&mut h, r);
            negate_col(&mut u, r);
        }
        // reduce the entries of earlier columns in this pivot row into [0, pivot)
        for j in 0..r {
            let q = h[(i, j)].div_floor(&h[(i, r)]);
            if !q.is_zero() {
                add_col(&mut h, j, r, &q);
                add_col(&mut u, j, r, &q);
            }
        }
        r += 1;
    }
    (h, u)
}

impl Lattice {
    /// The lattice spanned by `generators` inside Z^ambient. Dependent
    /// generators are absorbed by the HNF reduction.
    pub fn from_generators(ambient: usize, generators: &[Vec<BigInt>]) -> Result<Lattice> {
        for (k, g) in generators.iter().enumerate() {
            if g.len() != ambient {
                return Err(Error::input(format!(
                    "generator {} has length {}, expected ambient rank {}",
                    k,
                    g.len(),
                    ambient
                )));
            }
        }
        let mut gens = IntMatrix::zero(ambient, generators.len());
        for (j, g) in generators.iter().enumerate() {
            gens.set_col(j, g);
        }
        Ok(Self::from_generator_matrix(&gens))
    }

    /// Columns of `gens` span the lattice.
    pub fn from_generator_matrix(gens: &IntMatrix) -> Lattice {
        let (h, _) = hnf_with_transform(gens);
        let rank = (0..h.cols())
            .take_while(|&j| !h.col(j).iter().all(|x| x.is_zero()))
            .count();
        Lattice {
            ambient: h.rows(),
            basis: h.block(0, 0, h.rows(), rank),
        }
    }

    pub fn from_i64_generators(ambient: usize, generators: &[Vec<i64>]) -> Result<Lattice> {
        let gens: Vec<Vec<BigInt>> = generators
            .iter()
            .map(|g| g.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Lattice::from_generators(ambient, &gens)
    }

    pub fn zero(ambient: usize) -> Lattice {
        Lattice {
            ambient,
            basis: IntMatrix::zero(ambient, 0),
        }
    }

    pub fn full(ambient: usize) -> Lattice {
        Lattice {
            ambient,
            basis: IntMatrix::identity(ambient),
        }
    }

    /// The span of standard basis vectors e_lo .. e_{hi-1}.
    pub fn coordinate_span(ambient: usize, lo: usize, hi: usize) -> Lattice {
        assert!(lo <= hi && hi <= ambient);
        let mut b = IntMatrix::zero(ambient, hi - lo);
        for (j, i) in (lo..hi).enumerate() {
            b[(i, j)] = BigInt::one();
        }
        Lattice { ambient, basis: b }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    /// Canonical basis, as columns of an ambient x rank matrix.
    pub fn basis_matrix(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<BigInt>> {
        (0..self.rank()).map(|j| self.basis.col(j)).collect()
    }

    fn check_same_ambient(&self, other: &Lattice) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::input(format!(
                "ambient rank mismatch: {} vs {}",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    /// Exact membership test against the canonical basis.
    pub fn contains(&self, v: &[BigInt]) -> Result<bool> {
        if v.len() != self.ambient {
            return Err(Error::input(format!(
                "vector length {} does not match ambient rank {}",
                v.len(),
                self.ambient
            )));
        }
        Ok(self.coordinates(v).is_some())
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        let mut rem: Vec<BigInt> = v.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        let mut row = 0usize;
        for j in 0..self.rank() {
            // pivot row of column j: first nonzero entry
            while row < self.ambient && self.basis[(row, j)].is_zero() {
                if !rem[row].is_zero() {
                    return None;
                }
                row += 1;
            }
            debug_assert!(row < self.ambient);
            let (q, r) = rem[row].div_rem(&self.basis[(row, j)]);
            if !r.is_zero() {
                return None;
            }
            for i in row..self.ambient {
                let t = &q * &self.basis[(i, j)];
                rem[i] -= t;
            }
            coords.push(q);
        }
        if rem.iter().any(|x| !x.is_zero()) {
            return None;
        }
        Some(coords)
    }

    pub fn contains_lattice(&self, sub: &Lattice) -> Result<bool> {
        self.check_same_ambient(sub)?;
        for j in 0..sub.rank() {
            if !self.contains(&sub.basis.col(j))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// a + b, the lattice generated by both.
    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        self.check_same_ambient(other)?;
        Ok(Lattice::from_generator_matrix(
            &self.basis.hstack(&other.basis),
        ))
    }

    /// The intersection, via the kernel of the stacked basis [A | -B]: for each kernel
    /// vector (x, y) the point A x = B y lies in both lattices, and these
    /// points generate the intersection.
    pub fn intersect(&self, other: &Lattice) -> Result<Lattice> {
        self.check_same_ambient(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Lattice::zero(self.ambient));
        }
        let stacked = self.basis.hstack(&other.basis.neg());
        let (h, u) = hnf_with_transform(&stacked);
        let ra = self.rank();
        let mut gens = Vec::new();
        for j in 0..h.cols() {
            if h.col(j).iter().all(|x| x.is_zero()) {
                let x: Vec<BigInt> = (0..ra).map(|i| u[(i, j)].clone()).collect();
                gens.push(self.basis.mul_vec(&x));
            }
        }
        Lattice::from_generators(self.ambient, &gens)
    }

    /// The saturation J = { v : m v in self for some m != 0 }, computed by
    /// a double kernel so that no rational arithmetic is needed. Kernels of
    /// integer matrices are saturated, and the kernel of the transpose of a
    /// kernel basis of basis^T cuts out exactly the rational span.
    pub fn saturate(&self) -> Lattice {
        if self.is_zero() {
            return self.clone();
        }
        let orth = kernel(&self.basis.transpose());
        let sat = kernel(&orth.basis.transpose());
        debug_assert_eq!(sat.rank(), self.rank());
        debug_assert!(sat.contains_lattice(self).unwrap());
        sat
    }

    /// The index [sup : sub]; requires sub to actually be a sublattice.
    pub fn index_in(sub: &Lattice, sup: &Lattice) -> Result<Index> {
        sup.check_same_ambient(sub)?;
        if !sup.contains_lattice(sub)? {
            return Err(Error::input(
                "index_in: first argument is not a sublattice of the second",
            ));
        }
        if sub.rank() < sup.rank() {
            return Ok(Index::Infinite);
        }
        let r = sup.rank();
        let mut x = IntMatrix::zero(r, r);
        for j in 0..r {
            let coords = sup
                .coordinates(&sub.basis.col(j))
                .ok_or_else(|| Error::internal("containment check passed but solve failed"))?;
            x.set_col(j, &coords);
        }
        Ok(Index::Finite(x.det().abs()))
    }

    /// The image lattice m(self) inside Z^{m.rows()}.
    pub fn image(&self, m: &IntMatrix) -> Result<Lattice> {
        if m.cols() != self.ambient {
            return Err(Error::input(format!(
                "image: matrix has {} columns, ambient rank is {}",
                m.cols(),
                self.ambient
            )));
        }
        Ok(Lattice::from_generator_matrix(&m.mul(&self.basis)))
    }
}

/// Kernel lattice { v : m v = 0 } of an integer matrix.
pub fn kernel(m: &IntMatrix) -> Lattice {
    let (h, u) = hnf_with_transform(m);
    let mut gens = Vec::new();
    for j in 0..h.cols() {
        if h.col(j).iter().all(|x| x.is_zero()) {
            gens.push(u.col(j));
        }
    }
    Lattice::from_generators(m.cols(), &gens).expect("kernel generators have the right length")
}

/// One integer solution of `a x = b`, if any.
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows(), b.len());
    let (h, u) = hnf_with_transform(a);
    let rank = (0..h.cols())
        .take_while(|&j| !h.col(j).iter().all(|x| x.is_zero()))
        .count();
    let lat = Lattice {
        ambient: a.rows(),
        basis: h.block(0, 0, a.rows(), rank),
    };
    let mut y = lat.coordinates(b)?;
    y.resize(a.cols(), BigInt::zero());
    Some(u.mul_vec(&y))
}

/// Integer solutions of `a x = b` column by column: a matrix X with
/// a X = b, if one exists.
pub fn solve_matrix(a: &IntMatrix, b: &IntMatrix) -> Option<IntMatrix> {
    assert_eq!(a.rows(), b.rows());
    let mut x = IntMatrix::zero(a.cols(), b.cols());
    for j in 0..b.cols() {
        let col = solve(a, &b.col(j))?;
        x.set_col(j, &col);
    }
    Some(x)
}

/// Invariant factors d_1 | d_2 | ... of an integer matrix (Smith normal
/// form diagonal, zeros dropped).
pub fn snf_invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let mut a = m.clone();
    let rows = a.rows();
    let cols = a.cols();
    let n = rows.min(cols);
    let mut factors = Vec::new();
    let mut t = 0usize;
    'outer: while t < n {
        // find a nonzero entry of minimal absolute value in the remaining block
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[(i, j)].is_zero() {
                    pivot = match pivot {
                        Some((pi, pj)) if a[(pi, pj)].abs() <= a[(i, j)].abs() => Some((pi, pj)),
                        _ => Some((i, j)),
                    };
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        for j in 0..cols {
            let tmp = a[(t, j)].clone();
            a[(t, j)] = a[(pi, j)].clone();
            a[(pi, j)] = tmp;
        }
        for i in 0..rows {
            let tmp = a[(i, t)].clone();
            a[(i, t)] = a[(i, pj)].clone();
            a[(i, pj)] = tmp;
        }
        // clear row and column t by Euclidean steps
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if !a[(i, t)].is_zero() {
                    let q = a[(i, t)].div_floor(&a[(t, t)]);
                    for j in 0..cols {
                        let s = &q * &a[(t, j)];
                        a[(i, j)] -= s;
                    }
                    if !a[(i, t)].is_zero() {
                        // remainder became the smaller entry; swap rows and retry
                        for j in 0..cols {
                            let tmp = a[(t, j)].clone();
                            a[(t, j)] = a[(i, j)].clone();
                            a[(i, j)] = tmp;
                        }
                        dirty = true;
                    }
                }
            }
            for j in t + 1..cols {
                if !a[(t, j)].is_zero() {
                    let q = a[(t, j)].div_floor(&a[(t, t)]);
                    for i in 0..rows {
                        let s = &q * &a[(i, t)];
                        a[(i, j)] -= s;
                    }
                    if !a[(t, j)].is_zero() {
                        for i in 0..rows {
                            let tmp = a[(i, t)].clone();
                            a[(i, t)] = a[(i, j)].clone();
                            a[(i, j)] = tmp;
                        }
                        dirty = true;
                    }
                }
            }
            if !dirty {
                break;
            }
        }
        // divisibility: every remaining entry must be divisible by the pivot
        for i in t + 1..rows {
            for j in t + 1..cols {
                if !(&a[(i, j)] % &a[(t, t)]).is_zero() {
                    for jj in 0..cols {
                        let add = a[(i, jj)].clone();
                        a[(t, jj)] += add;
                    }
                    continue 'outer;
                }
            }
        }
        factors.push(a[(t, t)].abs());
        t += 1;
    }
    factors
}
