//! Correspondence analysis of clique/context incidence matrices.
//!
//! With `N` the binary incidence matrix, `n` its grand total, `P = N / n`,
//! row masses `r` and column masses `c`, the standardized residuals are
//!
//! ```text
//! S_ij = (P_ij - r_i c_j) / sqrt(r_i c_j)
//! ```
//!
//! and the thin SVD `S = U Σ Vᵀ` gives row principal coordinates
//! `F = diag(r)^-1/2 U Σ` and column principal coordinates
//! `G = diag(c)^-1/2 V Σ`. Squared singular values are the axis inertias
//! and sum to the chi-square statistic of `N` divided by `n`.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::clique::{Clique, CliqueId};
use crate::error::{Error, Result};
use crate::unit::{LexicalUnit, Pos};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Binary clique-by-context membership table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    pub target: LexicalUnit,
    pub rows: Vec<CliqueId>,
    pub cols: Vec<LexicalUnit>,
    cells: Vec<bool>,
}

impl IncidenceMatrix {
    /// Unlabelled matrix from dense 0/1 rows. Rows are labelled `r0, r1, …`
    /// and columns `c0#X, c1#X, …`.
    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self> {
        let width = rows.first().map(Vec::len).unwrap_or(0);
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::InvalidParameter("ragged incidence rows".into()));
        }
        let m = IncidenceMatrix {
            target: LexicalUnit::new("_", Pos::X),
            rows: (0..rows.len()).map(|i| CliqueId(format!("r{i}"))).collect(),
            cols: (0..width).map(|j| LexicalUnit::new(format!("c{j}"), Pos::X)).collect(),
            cells: rows.iter().flatten().map(|&v| v != 0).collect(),
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if self.rows.is_empty() || self.cols.is_empty() {
            return Err(Error::NoSenses);
        }
        for i in 0..self.n_rows() {
            if self.row_sum(i) == 0 {
                return Err(Error::InvalidParameter(format!("incidence row {i} is empty")));
            }
        }
        for j in 0..self.n_cols() {
            if (0..self.n_rows()).all(|i| !self.get(i, j)) {
                return Err(Error::InvalidParameter(format!("incidence column {j} is empty")));
            }
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.cols.len() + j]
    }

    pub fn row(&self, i: usize) -> &[bool] {
        let w = self.cols.len();
        &self.cells[i * w..(i + 1) * w]
    }

    pub fn row_sum(&self, i: usize) -> usize {
        self.row(i).iter().filter(|&&b| b).count()
    }

    pub fn col_sum(&self, j: usize) -> usize {
        (0..self.n_rows()).filter(|&i| self.get(i, j)).count()
    }

    pub fn total(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.n_rows()).map(|i| self.row(i).iter().map(|&b| b as u8).collect()).collect()
    }
}

/// One row per clique (input order), one column per distinct member unit
/// (sorted).
pub fn build_incidence(cliques: &[Clique]) -> Result<IncidenceMatrix> {
    let first = cliques.first().ok_or(Error::NoSenses)?;
    let mut cols: Vec<LexicalUnit> = cliques.iter().flat_map(|c| c.members.iter().cloned()).collect();
    cols.sort();
    cols.dedup();
    let mut cells = Vec::with_capacity(cliques.len() * cols.len());
    for c in cliques {
        cells.extend(cols.iter().map(|u| c.contains(u)));
    }
    let m = IncidenceMatrix {
        target: first.target.clone(),
        rows: cliques.iter().map(|c| c.id.clone()).collect(),
        cols,
        cells,
    };
    m.validate()?;
    Ok(m)
}

/// Factor-space placement of one target's cliques and contexts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SemanticMap {
    pub target: LexicalUnit,
    pub clique_ids: Vec<CliqueId>,
    /// Row principal coordinates, one vector per clique over all retained
    /// axes.
    pub clique_coords: Vec<Vec<f64>>,
    pub contexts: Vec<LexicalUnit>,
    pub context_coords: Vec<Vec<f64>>,
    /// Squared singular value of each retained axis, non-increasing.
    pub inertias: Vec<f64>,
    pub total_inertia: f64,
    /// Axes used for the 2D display; fewer than two when the rank is low.
    pub axes_2d: Vec<usize>,
}

impl SemanticMap {
    pub fn n_axes(&self) -> usize {
        self.inertias.len()
    }

    pub fn singular_values(&self) -> Vec<f64> {
        self.inertias.iter().map(|v| v.sqrt()).collect()
    }

    /// Display position of clique `i`; missing axes read as 0.
    pub fn clique_xy(&self, i: usize) -> [f64; 2] {
        project(&self.clique_coords[i], &self.axes_2d)
    }

    pub fn context_xy(&self, j: usize) -> [f64; 2] {
        project(&self.context_coords[j], &self.axes_2d)
    }
}

fn project(coords: &[f64], axes: &[usize]) -> [f64; 2] {
    let mut xy = [0.0; 2];
    for (slot, &a) in axes.iter().take(2).enumerate() {
        xy[slot] = coords[a];
    }
    xy
}

/// Runs correspondence analysis. Axes with singular value `<= tol` are
/// dropped, and at most `min(rows, cols) - 1` axes are kept. On each axis
/// the clique coordinate of largest magnitude is made positive.
pub fn correspondence_analysis(m: &IncidenceMatrix, tol: f64) -> Result<SemanticMap> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance must be non-negative, got {tol}")));
    }
    let (rows, cols) = (m.n_rows(), m.n_cols());
    let n = m.total() as f64;
    let r: Vec<f64> = (0..rows).map(|i| m.row_sum(i) as f64 / n).collect();
    let c: Vec<f64> = (0..cols).map(|j| m.col_sum(j) as f64 / n).collect();

    let s = Mat::from_fn(rows, cols, |i, j| {
        let p = if m.get(i, j) { 1.0 / n } else { 0.0 };
        let e = r[i] * c[j];
        (p - e) / e.sqrt()
    });

    let svd = s.thin_svd().map_err(|e| Error::Numerical(format!("SVD did not converge: {e:?}")))?;
    let (u, v, sv) = (svd.U(), svd.V(), svd.S().column_vector());
    let sigma_at = |k: usize| sv[k];
    let n_sv = rows.min(cols);
    if (0..n_sv).any(|k| !sigma_at(k).is_finite()) {
        return Err(Error::Numerical("non-finite singular value".into()));
    }

    let mut order: Vec<usize> = (0..n_sv).collect();
    order.sort_by(|&a, &b| sigma_at(b).total_cmp(&sigma_at(a)).then(a.cmp(&b)));
    let max_axes = rows.min(cols).saturating_sub(1);
    let kept: Vec<usize> = order.into_iter().filter(|&k| sigma_at(k) > tol).take(max_axes).collect();

    let mut clique_coords = vec![Vec::with_capacity(kept.len()); rows];
    let mut context_coords = vec![Vec::with_capacity(kept.len()); cols];
    let mut inertias = Vec::with_capacity(kept.len());
    for &k in &kept {
        let sigma = sigma_at(k);
        let f: Vec<f64> = (0..rows).map(|i| u[(i, k)] * sigma / r[i].sqrt()).collect();
        let g: Vec<f64> = (0..cols).map(|j| v[(j, k)] * sigma / c[j].sqrt()).collect();
        let sign = axis_sign(&f);
        for (i, x) in f.into_iter().enumerate() {
            clique_coords[i].push(sign * x);
        }
        for (j, x) in g.into_iter().enumerate() {
            context_coords[j].push(sign * x);
        }
        inertias.push(sigma * sigma);
    }

    Ok(SemanticMap {
        target: m.target.clone(),
        clique_ids: m.rows.clone(),
        clique_coords,
        contexts: m.cols.clone(),
        context_coords,
        total_inertia: inertias.iter().sum(),
        axes_2d: (0..inertias.len().min(2)).collect(),
        inertias,
    })
}

/// +1 or -1 so that the first coordinate of (near-)maximal magnitude is
/// positive.
fn axis_sign(values: &[f64]) -> f64 {
    let max = values.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let lead = values.iter().find(|x| x.abs() >= max * (1.0 - 1e-9)).copied().unwrap_or(0.0);
    if lead < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Chi-square distance between the profiles of rows `i` and `j`.
pub fn chi_square_row_distance(m: &IncidenceMatrix, i: usize, j: usize) -> f64 {
    let n = m.total() as f64;
    let (ri, rj) = (m.row_sum(i) as f64, m.row_sum(j) as f64);
    (0..m.n_cols())
        .map(|k| {
            let a = m.get(i, k) as u8 as f64 / ri;
            let b = m.get(j, k) as u8 as f64 / rj;
            let ck = m.col_sum(k) as f64 / n;
            (a - b).powi(2) / ck
        })
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::RelationKind;
    use std::collections::BTreeSet;

    fn clique(members: &[&str]) -> Clique {
        Clique::new(
            LexicalUnit::new("t", Pos::Noun),
            members.iter().map(|k| LexicalUnit::new(*k, Pos::Noun)).collect(),
            RelationKind::Primary,
            BTreeSet::new(),
        )
    }

    #[test]
    fn incidence_of_two_cliques() {
        let m = build_incidence(&[clique(&["a", "b"]), clique(&["b", "c"])]).unwrap();
        assert_eq!(m.to_dense(), vec![vec![1, 1, 0], vec![0, 1, 1]]);
        let m = build_incidence(&[clique(&["a", "b"])]).unwrap();
        assert_eq!((m.n_rows(), m.n_cols()), (1, 2));
        assert!(matches!(build_incidence(&[]), Err(Error::NoSenses)));
    }

    #[test]
    fn identity_2x2() {
        let m = IncidenceMatrix::from_dense(&[vec![1, 0], vec![0, 1]]).unwrap();
        let map = correspondence_analysis(&m, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(map.n_axes(), 1);
        assert!((map.singular_values()[0] - 1.0).abs() < 1e-12);
        assert!((map.clique_coords[0][0] - 1.0).abs() < 1e-12);
        assert!((map.clique_coords[1][0] + 1.0).abs() < 1e-12);
        assert!((chi_square_row_distance(&m, 0, 1) - 2.0).abs() < 1e-12);
        assert_eq!(map.axes_2d, vec![0]);
        assert_eq!(map.clique_xy(1), [map.clique_coords[1][0], 0.0]);
    }

    #[test]
    fn identical_rows_collapse() {
        let m = IncidenceMatrix::from_dense(&[vec![1, 1, 0, 1], vec![1, 1, 0, 1], vec![1, 1, 0, 1]]);
        // column 2 empty
        assert!(m.is_err());
        let m = IncidenceMatrix::from_dense(&[vec![1, 1, 1], vec![1, 1, 1]]).unwrap();
        let map = correspondence_analysis(&m, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(map.n_axes(), 0);
        assert_eq!(map.total_inertia, 0.0);
        assert!(map.clique_coords.iter().all(|c| c.is_empty()));
        assert_eq!(map.clique_xy(0), [0.0, 0.0]);
    }

    #[test]
    fn one_by_one_is_degenerate() {
        let m = IncidenceMatrix::from_dense(&[vec![1]]).unwrap();
        let map = correspondence_analysis(&m, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(map.n_axes(), 0);
        assert!(map.axes_2d.is_empty());
    }

    #[test]
    fn negative_tolerance_rejected() {
        let m = IncidenceMatrix::from_dense(&[vec![1]]).unwrap();
        assert!(correspondence_analysis(&m, -1.0).is_err());
        assert!(correspondence_analysis(&m, f64::NAN).is_err());
    }

    #[test]
    fn ragged_and_empty_rows_rejected() {
        assert!(IncidenceMatrix::from_dense(&[vec![1, 0], vec![1]]).is_err());
        assert!(IncidenceMatrix::from_dense(&[vec![1, 1], vec![0, 0]]).is_err());
        assert!(IncidenceMatrix::from_dense(&[]).is_err());
    }
}
