//! Dense row-major matrices, embedding parameter sets, and the embedding
//! dump format shared by both backends.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Row-major dense matrix of `f64`. Rows are contiguous slices, which is the
/// layout every distance kernel in this crate iterates over.
#[derive(Debug, Clone, PartialEq)]
pub struct RowMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RowMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RowMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length mismatch");
        RowMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        RowMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Number of distinct rows (exact element-wise comparison).
    pub fn distinct_rows(&self) -> usize {
        let mut seen: Vec<&[f64]> = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let r = self.row(i);
            if !seen.iter().any(|s| *s == r) {
                seen.push(r);
            }
        }
        seen.len()
    }
}

/// Squared Euclidean distance between two equal-length vectors.
#[inline]
pub fn euclidean_sq(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

/// Euclidean distance between two equal-length vectors.
#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    euclidean_sq(a, b).sqrt()
}

/// Which embedding algorithm produced (or should produce) an embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    NetMf,
    Ppr,
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::NetMf => write!(f, "netmf"),
            Backend::Ppr => write!(f, "ppr"),
        }
    }
}

/// One embedding parameter set `p ∈ 𝒫`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingParams {
    pub backend: Backend,
    /// Context window size `T` (netmf only).
    pub window: usize,
    /// Negative-sample count `b` (netmf only).
    pub negative: usize,
    /// Embedding dimension `d`. For the ppr backend this is overwritten with
    /// the node count at embedding time.
    pub dim: usize,
    pub seed: u64,
}

impl EmbeddingParams {
    pub fn netmf(window: usize, negative: usize, dim: usize, seed: u64) -> Self {
        EmbeddingParams {
            backend: Backend::NetMf,
            window,
            negative,
            dim,
            seed,
        }
    }

    pub fn ppr(seed: u64) -> Self {
        EmbeddingParams {
            backend: Backend::Ppr,
            window: 1,
            negative: 1,
            dim: 0,
            seed,
        }
    }

    pub fn validate(&self, n_nodes: usize) -> Result<()> {
        if self.backend == Backend::NetMf {
            if self.window == 0 {
                return Err(Error::InvalidParameter {
                    name: "window",
                    reason: "T must be >= 1".into(),
                });
            }
            if self.negative == 0 {
                return Err(Error::InvalidParameter {
                    name: "negative",
                    reason: "b must be >= 1".into(),
                });
            }
            if self.dim == 0 || self.dim > n_nodes {
                return Err(Error::InvalidParameter {
                    name: "dim",
                    reason: format!("d must satisfy 1 <= d <= {n_nodes}, got {}", self.dim),
                });
            }
        }
        Ok(())
    }

    /// Compact stable description used in reports and provenance lines.
    pub fn describe(&self) -> String {
        match self.backend {
            Backend::NetMf => format!(
                "backend=netmf T={} b={} d={} seed={}",
                self.window, self.negative, self.dim, self.seed
            ),
            Backend::Ppr => format!("backend=ppr d={} seed={}", self.dim, self.seed),
        }
    }
}

/// Node embedding: one row per node, plus provenance.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub matrix: RowMatrix,
    pub params: EmbeddingParams,
    /// Degree-0 nodes, which receive all-zero rows under netmf.
    pub zero_degree_rows: usize,
    /// Rows whose power iteration hit `max_iter` before reaching `tol`.
    pub unconverged_rows: usize,
}

impl Embedding {
    pub fn new(matrix: RowMatrix, params: EmbeddingParams) -> Self {
        Embedding {
            matrix,
            params,
            zero_degree_rows: 0,
            unconverged_rows: 0,
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.matrix.n_rows()
    }

    pub fn dim(&self) -> usize {
        self.matrix.n_cols()
    }

    /// Writes the dump format: a `n d` header line, then one row per line of
    /// `d` reals with full round-trip precision.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        write_matrix_dump(&self.matrix, &mut w)
    }
}

/// Writes `m` in the embedding dump format.
pub fn write_matrix_dump<W: Write>(m: &RowMatrix, w: &mut W) -> Result<()> {
    writeln!(w, "{} {}", m.n_rows(), m.n_cols())?;
    let mut line = String::new();
    for i in 0..m.n_rows() {
        line.clear();
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                line.push(' ');
            }
            line.push_str(&v.to_string());
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Reads the embedding dump format back into a matrix.
pub fn read_matrix_dump<R: BufRead>(reader: R) -> Result<RowMatrix> {
    let mut lines = reader.lines();
    let header = lines.next().ok_or(Error::EmptyInput)??;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(Error::MalformedLine {
            line: 1,
            reason: "expected header `n d`".into(),
        });
    }
    let parse = |s: &str, line: usize| -> Result<usize> {
        s.parse().map_err(|_| Error::MalformedLine {
            line,
            reason: format!("cannot parse `{s}`"),
        })
    };
    let n = parse(dims[0], 1)?;
    let d = parse(dims[1], 1)?;
    let mut data = Vec::with_capacity(n * d);
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let before = data.len();
        for field in line.split_whitespace() {
            let v: f64 = field.parse().map_err(|_| Error::MalformedLine {
                line: i + 2,
                reason: format!("cannot parse value `{field}`"),
            })?;
            data.push(v);
        }
        if data.len() - before != d {
            return Err(Error::MalformedLine {
                line: i + 2,
                reason: format!("expected {d} values, found {}", data.len() - before),
            });
        }
    }
    if data.len() != n * d {
        return Err(Error::DimensionMismatch {
            expected: n * d,
            got: data.len(),
        });
    }
    Ok(RowMatrix::from_vec(n, d, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn dump_round_trips_at_full_precision() {
        let m = RowMatrix::from_rows(&[
            vec![0.1, -2.5e-17, 3.0],
            vec![std::f64::consts::PI, 1.0 / 3.0, -0.0],
        ]);
        let mut buf = Vec::new();
        write_matrix_dump(&m, &mut buf).unwrap();
        let back = read_matrix_dump(Cursor::new(&buf)).unwrap();
        assert_eq!(m.data(), back.data());
    }

    #[test]
    fn distinct_rows_counts_duplicates_once() {
        let m = RowMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0, 2.0], vec![0.0, 0.0]]);
        assert_eq!(m.distinct_rows(), 2);
    }

    #[test]
    fn distances() {
        assert_eq!(euclidean_sq(&[0.0, 0.0], &[3.0, 4.0]), 25.0);
        assert_eq!(euclidean(&[0.0, 0.0], &[3.0, 4.0]), 5.0);
    }
}
