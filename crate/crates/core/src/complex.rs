//! Simplicial complexes, signed boundary operators and Hodge Laplacians.
//!
//! Every simplex carries the reference orientation induced by its sorted
//! vertex list. The boundary of `[v_0, ..., v_k]` is
//! `sum_i (-1)^i [v_0, ..., v_i-hat, ..., v_k]`, so an edge `(a, b)` with
//! `a < b` has `-1` at `a` and `+1` at `b`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// An oriented simplex given by its strictly increasing vertex identifiers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: Vec<usize>,
}

impl Simplex {
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptySimplex);
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NonIncreasingSimplex(vertices));
        }
        Ok(Self { vertices })
    }

    /// Builds a simplex from vertices in any order. Duplicates are rejected.
    pub fn from_unsorted(mut vertices: Vec<usize>) -> Result<Self> {
        vertices.sort_unstable();
        Self::new(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn order(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Faces obtained by deleting one vertex, paired with the boundary sign
    /// `(-1)^i` of the deleted position `i`.
    pub fn signed_faces(&self) -> Vec<(Simplex, i8)> {
        if self.vertices.len() < 2 {
            return Vec::new();
        }
        (0..self.vertices.len())
            .map(|i| {
                let mut v = self.vertices.clone();
                v.remove(i);
                let sign = if i % 2 == 0 { 1 } else { -1 };
                (Simplex { vertices: v }, sign)
            })
            .collect()
    }

    fn is_subset_of(&self, other: &Simplex) -> bool {
        let mut it = other.vertices.iter();
        self.vertices.iter().all(|v| it.any(|w| w == v))
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Sparse integer boundary operator `B_k`, rows indexed by `(k-1)`-simplices
/// and columns by `k`-simplices in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedIncidenceMatrix {
    rows: usize,
    cols: usize,
    /// `(row, col, sign)` triplets sorted by column then row.
    entries: Vec<(usize, usize, i8)>,
}

impl SignedIncidenceMatrix {
    pub fn new(rows: usize, cols: usize, mut entries: Vec<(usize, usize, i8)>) -> Self {
        entries.sort_by_key(|&(r, c, _)| (c, r));
        Self { rows, cols, entries }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, i8)] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.entries.iter().find(|&&(r, c, _)| r == row && c == col).map_or(0, |&(_, _, s)| s)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for &(r, c, s) in &self.entries {
            m[(r, c)] = f64::from(s);
        }
        m
    }

    pub fn to_dense_int(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0i64; self.cols]; self.rows];
        for &(r, c, s) in &self.entries {
            m[r][c] = i64::from(s);
        }
        m
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.cols, self.rows, self.entries.iter().map(|&(r, c, s)| (c, r, s)).collect())
    }

    /// Exact integer product `self * other`.
    pub fn mul_int(&self, other: &SignedIncidenceMatrix) -> Result<Vec<Vec<i64>>> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = vec![vec![0i64; other.cols]; self.rows];
        let mut by_row: Vec<Vec<(usize, i8)>> = vec![Vec::new(); other.rows];
        for &(r, c, s) in &other.entries {
            by_row[r].push((c, s));
        }
        for &(r, k, s) in &self.entries {
            for &(c, t) in &by_row[k] {
                out[r][c] += i64::from(s) * i64::from(t);
            }
        }
        Ok(out)
    }

    /// Negates the given columns (re-orients the corresponding simplices).
    pub fn flip_columns(&self, flip: &[bool]) -> Self {
        let entries = self.entries.iter().map(|&(r, c, s)| (r, c, if flip[c] { -s } else { s })).collect();
        Self::new(self.rows, self.cols, entries)
    }

    /// Negates the given rows.
    pub fn flip_rows(&self, flip: &[bool]) -> Self {
        let entries = self.entries.iter().map(|&(r, c, s)| (r, c, if flip[r] { -s } else { s })).collect();
        Self::new(self.rows, self.cols, entries)
    }

    /// Rank over the rationals by fraction-free Gaussian elimination.
    pub fn rank(&self) -> usize {
        integer_rank(&self.to_dense_int())
    }
}

/// Exact rank of an integer matrix. Rows are reduced by their gcd after each
/// elimination step, which keeps entries small for incidence-type matrices.
pub fn integer_rank(matrix: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<i128>> = matrix.iter().map(|row| row.iter().map(|&x| i128::from(x)).collect()).collect();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let p = m[rank][col];
        for r in (rank + 1)..rows {
            let f = m[r][col];
            if f == 0 {
                continue;
            }
            let (top, rest) = m.split_at_mut(r);
            for (dst, src) in rest[0][col..].iter_mut().zip(&top[rank][col..]) {
                *dst = *dst * p - src * f;
            }
            let g = m[r].iter().fold(0i128, |acc, &x| gcd(acc, x.abs()));
            if g > 1 {
                m[r].iter_mut().for_each(|x| *x /= g);
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A simplicial complex closed under taking faces, with simplices of each
/// order stored in lexicographic order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SimplicialComplex {
    by_order: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
}

impl SimplicialComplex {
    /// Closure of the given simplices. Input order and duplicates are
    /// irrelevant; an empty input gives the empty complex.
    pub fn from_maximal_simplices(maximal: &[Simplex]) -> Self {
        let mut sets: Vec<BTreeSet<Simplex>> = Vec::new();
        for s in maximal {
            let k = s.order();
            if sets.len() <= k {
                sets.resize_with(k + 1, BTreeSet::new);
            }
            sets[k].insert(s.clone());
        }
        for k in (1..sets.len()).rev() {
            let faces: Vec<Simplex> =
                sets[k].iter().flat_map(|s| s.signed_faces().into_iter().map(|(f, _)| f)).collect();
            sets[k - 1].extend(faces);
        }
        let by_order: Vec<Vec<Simplex>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let index =
            by_order.iter().map(|list| list.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect()).collect();
        Self { by_order, index }
    }

    /// Convenience constructor from raw vertex lists.
    pub fn from_vertex_lists(lists: &[Vec<usize>]) -> Result<Self> {
        let simplices = lists.iter().map(|v| Simplex::new(v.clone())).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_maximal_simplices(&simplices))
    }

    /// Highest order present, or `None` for the empty complex.
    pub fn max_order(&self) -> Option<usize> {
        self.by_order.len().checked_sub(1)
    }

    pub fn count(&self, order: usize) -> usize {
        self.by_order.get(order).map_or(0, Vec::len)
    }

    pub fn num_nodes(&self) -> usize {
        self.count(0)
    }

    pub fn num_edges(&self) -> usize {
        self.count(1)
    }

    pub fn num_triangles(&self) -> usize {
        self.count(2)
    }

    pub fn simplices(&self, order: usize) -> &[Simplex] {
        self.by_order.get(order).map_or(&[], Vec::as_slice)
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s.order()).and_then(|m| m.get(s).copied())
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    /// Simplices not contained in any higher-order simplex.
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        let mut out = Vec::new();
        for k in 0..self.by_order.len() {
            for s in &self.by_order[k] {
                if self.simplices(k + 1).iter().all(|t| !s.is_subset_of(t)) {
                    out.push(s.clone());
                }
            }
        }
        out
    }

    pub fn faces(&self, s: &Simplex) -> Result<Vec<Simplex>> {
        if !self.contains(s) {
            return Err(Error::UnknownSimplex(s.vertices.clone()));
        }
        Ok(s.signed_faces().into_iter().map(|(f, _)| f).collect())
    }

    pub fn cofaces(&self, s: &Simplex) -> Result<Vec<Simplex>> {
        if !self.contains(s) {
            return Err(Error::UnknownSimplex(s.vertices.clone()));
        }
        Ok(self.simplices(s.order() + 1).iter().filter(|t| s.is_subset_of(t)).cloned().collect())
    }

    /// Signed boundary operator `B_k`. Missing orders give zero-sized
    /// dimensions rather than errors.
    pub fn boundary_matrix(&self, k: usize) -> Result<SignedIncidenceMatrix> {
        if k == 0 {
            return Err(Error::ZeroOrderBoundary);
        }
        let rows = self.count(k - 1);
        let cols = self.count(k);
        let mut entries = Vec::with_capacity(cols * (k + 1));
        for (j, s) in self.simplices(k).iter().enumerate() {
            for (face, sign) in s.signed_faces() {
                let i = self.index[k - 1][&face];
                entries.push((i, j, sign));
            }
        }
        Ok(SignedIncidenceMatrix::new(rows, cols, entries))
    }

    fn check_order(&self, k: usize) -> Result<()> {
        match self.max_order() {
            Some(m) if k <= m => Ok(()),
            max_order => Err(Error::InvalidOrder { order: k, max_order }),
        }
    }

    /// Lower part `B_k^T B_k` (zero for `k = 0`).
    pub fn lower_laplacian(&self, k: usize) -> Result<DMatrix<f64>> {
        self.check_order(k)?;
        if k == 0 {
            return Ok(DMatrix::zeros(self.count(0), self.count(0)));
        }
        let b = self.boundary_matrix(k)?.to_dense();
        Ok(b.transpose() * b)
    }

    /// Upper part `B_{k+1} B_{k+1}^T` (zero when there are no `(k+1)`-simplices).
    pub fn upper_laplacian(&self, k: usize) -> Result<DMatrix<f64>> {
        self.check_order(k)?;
        let b = self.boundary_matrix(k + 1)?.to_dense();
        Ok(&b * b.transpose())
    }

    /// Combinatorial Hodge Laplacian `L_k = B_k^T B_k + B_{k+1} B_{k+1}^T`.
    pub fn hodge_laplacian(&self, k: usize) -> Result<DMatrix<f64>> {
        Ok(self.lower_laplacian(k)? + self.upper_laplacian(k)?)
    }

    /// Adjacency matrix of the 1-skeleton.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let n = self.num_nodes();
        let mut a = DMatrix::zeros(n, n);
        for e in self.simplices(1) {
            let i = self.index[0][&Simplex { vertices: vec![e.vertices[0]] }];
            let j = self.index[0][&Simplex { vertices: vec![e.vertices[1]] }];
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        a
    }

    /// Unweighted graph Laplacian of the line graph of the 1-skeleton.
    pub fn line_graph_laplacian(&self) -> Result<DMatrix<f64>> {
        let edges = self.simplices(1);
        if edges.is_empty() {
            return Err(Error::InvalidOrder { order: 1, max_order: self.max_order() });
        }
        let m = edges.len();
        let mut l = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in (i + 1)..m {
                let (a, b) = (&edges[i].vertices, &edges[j].vertices);
                if a.iter().any(|v| b.contains(v)) {
                    l[(i, j)] = -1.0;
                    l[(j, i)] = -1.0;
                    l[(i, i)] += 1.0;
                    l[(j, j)] += 1.0;
                }
            }
        }
        Ok(l)
    }

    /// Connected component id of every node (in canonical node order).
    pub fn node_components(&self) -> Vec<usize> {
        let n = self.num_nodes();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in self.simplices(1) {
            let i = self.index[0][&Simplex { vertices: vec![e.vertices[0]] }];
            let j = self.index[0][&Simplex { vertices: vec![e.vertices[1]] }];
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
        let mut ids = HashMap::new();
        (0..n)
            .map(|i| {
                let r = find(&mut parent, i);
                let next = ids.len();
                *ids.entry(r).or_insert(next)
            })
            .collect()
    }
}
