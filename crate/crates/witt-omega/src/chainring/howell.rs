//! Canonical row spans over a Galois ring `W_L(k)`: Howell form, membership,
//! kernels and Smith invariants.

use super::galois::{GaloisRing, Gr};

/// A dense matrix over a Galois ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMatrix {
    pub ring: GaloisRing,
    pub cols: usize,
    pub rows: Vec<Vec<Gr>>,
}

/// Row span in Howell form. Every pivot is a power `p^v` and each row carries
/// the column of its pivot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Span {
    pub ring: GaloisRing,
    pub cols: usize,
    pub rows: Vec<Vec<Gr>>,
    /// `(column, valuation)` of each row's pivot.
    pub pivots: Vec<(usize, u32)>,
}

impl ChainMatrix {
    pub fn new(ring: GaloisRing, cols: usize) -> Self {
        ChainMatrix { ring, cols, rows: Vec::new() }
    }

    pub fn from_rows(ring: GaloisRing, cols: usize, rows: Vec<Vec<Gr>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        ChainMatrix { ring, cols, rows }
    }

    pub fn identity(ring: GaloisRing, n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![Gr::ZERO; n];
                r[i] = ring.one();
                r
            })
            .collect();
        ChainMatrix { ring, cols: n, rows }
    }

    pub fn push(&mut self, row: Vec<Gr>) {
        debug_assert_eq!(row.len(), self.cols);
        self.rows.push(row);
    }

    pub fn howell(&self) -> Span {
        howell(self.ring, self.cols, self.rows.clone())
    }

    pub fn smith(&self) -> Vec<u32> {
        smith_valuations(self.ring, self.cols, &self.rows)
    }

    pub fn transpose(&self) -> ChainMatrix {
        let rows = (0..self.cols).map(|j| self.rows.iter().map(|r| r[j]).collect()).collect();
        ChainMatrix { ring: self.ring, cols: self.rows.len(), rows }
    }
}

fn axpy(ring: &GaloisRing, dst: &mut [Gr], c: Gr, src: &[Gr], from: usize) {
    if c.is_zero() {
        return;
    }
    for j in from..dst.len() {
        if !src[j].is_zero() {
            dst[j] = ring.add(dst[j], ring.mul(c, src[j]));
        }
    }
}

fn scale(ring: &GaloisRing, row: &mut [Gr], c: Gr) {
    for x in row.iter_mut() {
        if !x.is_zero() {
            *x = ring.mul(*x, c);
        }
    }
}

/// Howell form of the span of `rows`.
pub fn howell(ring: GaloisRing, cols: usize, rows: Vec<Vec<Gr>>) -> Span {
    let level = ring.level;
    let mut work: Vec<Vec<Gr>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(|x| ring.reduce(x)).collect::<Vec<_>>())
        .filter(|r: &Vec<Gr>| r.iter().any(|x| !x.is_zero()))
        .collect();
    let mut out: Vec<Vec<Gr>> = Vec::new();
    let mut pivots = Vec::new();
    for col in 0..cols {
        if work.is_empty() {
            break;
        }
        let mut best: Option<(usize, u32)> = None;
        for (i, r) in work.iter().enumerate() {
            let v = ring.val(r[col]);
            if v < level && best.is_none_or(|(_, bv)| v < bv) {
                best = Some((i, v));
                if v == 0 {
                    break;
                }
            }
        }
        let Some((bi, v)) = best else { continue };
        let mut prow = work.swap_remove(bi);
        let unit = ring.div_p_pow(prow[col], v);
        scale(&ring, &mut prow, ring.inv(unit).expect("unit part"));
        for r in work.iter_mut() {
            if !r[col].is_zero() {
                let c = ring.neg(ring.div_p_pow(r[col], v));
                axpy(&ring, r, c, &prow, col);
            }
        }
        if v > 0 {
            let mut extra = prow.clone();
            scale(&ring, &mut extra, ring.from_int(ring.p().pow(level - v) as i64));
            if extra.iter().any(|x| !x.is_zero()) {
                work.push(extra);
            }
        }
        work.retain(|r| r.iter().any(|x| !x.is_zero()));
        out.push(prow);
        pivots.push((col, v));
    }
    // reduce entries above each pivot
    for i in 0..out.len() {
        let (col, v) = pivots[i];
        let (head, tail) = out.split_at_mut(i);
        let prow = &tail[0];
        for r in head.iter_mut() {
            let (q, _) = ring.split_p_pow(r[col], v);
            if !q.is_zero() {
                axpy(&ring, r, ring.neg(q), prow, col);
            }
        }
    }
    Span { ring, cols, rows: out, pivots }
}

impl Span {
    pub fn zero(ring: GaloisRing, cols: usize) -> Self {
        Span { ring, cols, rows: Vec::new(), pivots: Vec::new() }
    }

    /// `log_p` of the number of elements.
    pub fn log_card(&self) -> u64 {
        let r = self.ring.r() as u64;
        self.pivots.iter().map(|&(_, v)| r * (self.ring.level - v) as u64).sum()
    }

    /// Writes `x` in terms of the rows, or returns `None` if `x` is outside.
    pub fn solve(&self, x: &[Gr]) -> Option<Vec<Gr>> {
        let ring = &self.ring;
        let mut rest: Vec<Gr> = x.iter().map(|&a| ring.reduce(a)).collect();
        let mut coeffs = vec![Gr::ZERO; self.rows.len()];
        for (i, &(col, v)) in self.pivots.iter().enumerate() {
            let e = rest[col];
            if e.is_zero() {
                continue;
            }
            if ring.val(e) < v {
                return None;
            }
            let c = ring.div_p_pow(e, v);
            coeffs[i] = c;
            axpy(ring, &mut rest, ring.neg(c), &self.rows[i], col);
        }
        if rest.iter().all(|a| a.is_zero()) {
            Some(coeffs)
        } else {
            None
        }
    }

    pub fn contains(&self, x: &[Gr]) -> bool {
        self.solve(x).is_some()
    }

    pub fn contains_span(&self, other: &Span) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    /// Adds more generators.
    pub fn extend(&self, more: impl IntoIterator<Item = Vec<Gr>>) -> Span {
        let mut rows = self.rows.clone();
        rows.extend(more);
        howell(self.ring, self.cols, rows)
    }

    /// Exponents `e` with the span isomorphic to the sum of `W_e`.
    pub fn invariant_levels(&self) -> Vec<u32> {
        let mut v: Vec<u32> =
            smith_valuations(self.ring, self.cols, &self.rows).into_iter().map(|s| self.ring.level - s).filter(|&e| e > 0).collect();
        v.sort_unstable();
        v
    }

    /// Rows whose first `split` entries vanish, restricted to the remaining
    /// columns. Because of the Howell property they span the intersection of
    /// the span with `0 x W^(cols - split)`.
    pub fn tail_after(&self, split: usize) -> Span {
        let rows: Vec<Vec<Gr>> =
            self.rows.iter().zip(&self.pivots).filter(|(_, &(c, _))| c >= split).map(|(r, _)| r[split..].to_vec()).collect();
        howell(self.ring, self.cols - split, rows)
    }
}

/// Valuations of the Smith diagonal (entries equal to `level` are zeros and
/// are dropped).
pub fn smith_valuations(ring: GaloisRing, cols: usize, rows: &[Vec<Gr>]) -> Vec<u32> {
    let level = ring.level;
    let mut a: Vec<Vec<Gr>> = rows.iter().map(|r| r.iter().map(|&x| ring.reduce(x)).collect()).collect();
    let nrows = a.len();
    let mut out = Vec::new();
    let mut top = 0;
    let mut active_cols: Vec<usize> = (0..cols).collect();
    while top < nrows && !active_cols.is_empty() {
        let mut best: Option<(usize, usize, u32)> = None;
        'search: for i in top..nrows {
            for (ci, &j) in active_cols.iter().enumerate() {
                let v = ring.val(a[i][j]);
                if v < level && best.is_none_or(|b| v < b.2) {
                    best = Some((i, ci, v));
                    if v == 0 {
                        break 'search;
                    }
                }
            }
        }
        let Some((bi, bci, v)) = best else { break };
        a.swap(top, bi);
        let pc = active_cols.remove(bci);
        let unit = ring.div_p_pow(a[top][pc], v);
        let uinv = ring.inv(unit).unwrap();
        scale(&ring, &mut a[top], uinv);
        // clear the column
        let prow = a[top].clone();
        for i in top + 1..nrows {
            if !a[i][pc].is_zero() {
                let c = ring.neg(ring.div_p_pow(a[i][pc], v));
                axpy(&ring, &mut a[i], c, &prow, 0);
            }
        }
        // clearing the row does not change the remaining block, since column
        // operations with the pivot column only touch row `top` below it
        out.push(v);
        top += 1;
    }
    out
}
