//! Result-page geometry and the rank <-> cell bijection.
//!
//! Every layout is described by its row lengths, top to bottom. Ranks are read
//! row-major: left to right within a row, then down to the next row. Ranks,
//! rows and columns are all 1-based.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayoutKind {
    /// One item per row.
    LinearVertical,
    /// A single row.
    LinearHorizontal,
    /// One ranking wrapped across equal-width rows; the last row may be shorter.
    WrappedGrid,
    /// One list per row, rows may have any length.
    ///
    /// Browsing semantics are identical to [`LayoutKind::WrappedGrid`].
    MultiList,
}

impl LayoutKind {
    pub fn name(self) -> &'static str {
        match self {
            LayoutKind::LinearVertical => "linear_vertical",
            LayoutKind::LinearHorizontal => "linear_horizontal",
            LayoutKind::WrappedGrid => "wrapped_grid",
            LayoutKind::MultiList => "multi_list",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellAddress {
    pub row: usize,
    pub col: usize,
}

impl CellAddress {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

/// Validated layout geometry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutSpec {
    kind: LayoutKind,
    row_lengths: Vec<usize>,
    /// `row_offsets[k]` is the number of cells in rows before row `k + 1`.
    row_offsets: Vec<usize>,
}

impl LayoutSpec {
    pub fn new(kind: LayoutKind, row_lengths: Vec<usize>) -> Result<Self> {
        if row_lengths.is_empty() {
            return Err(Error::InvalidLayout("layout needs at least one row".into()));
        }
        if let Some(k) = row_lengths.iter().position(|&w| w == 0) {
            return Err(Error::InvalidLayout(format!(
                "row {} has zero cells",
                k + 1
            )));
        }
        match kind {
            LayoutKind::LinearVertical => {
                if row_lengths.iter().any(|&w| w != 1) {
                    return Err(Error::InvalidLayout(
                        "linear_vertical layouts have exactly one cell per row".into(),
                    ));
                }
            }
            LayoutKind::LinearHorizontal => {
                if row_lengths.len() != 1 {
                    return Err(Error::InvalidLayout(
                        "linear_horizontal layouts have exactly one row".into(),
                    ));
                }
            }
            LayoutKind::WrappedGrid => {
                let width = row_lengths[0];
                let (last, body) = row_lengths.split_last().expect("non-empty");
                if body.iter().any(|&w| w != width) || *last > width {
                    return Err(Error::InvalidLayout(
                        "wrapped_grid rows must share one width; only the last row may be shorter"
                            .into(),
                    ));
                }
            }
            LayoutKind::MultiList => {}
        }
        let row_offsets = row_lengths
            .iter()
            .scan(0, |acc, &w| {
                let start = *acc;
                *acc += w;
                Some(start)
            })
            .collect();
        Ok(Self {
            kind,
            row_lengths,
            row_offsets,
        })
    }

    pub fn linear_vertical(n: usize) -> Result<Self> {
        Self::new(LayoutKind::LinearVertical, vec![1; n])
    }

    pub fn linear_horizontal(n: usize) -> Result<Self> {
        Self::new(LayoutKind::LinearHorizontal, vec![n])
    }

    /// `rows` rows of `cols` cells each.
    pub fn grid(rows: usize, cols: usize) -> Result<Self> {
        Self::new(LayoutKind::WrappedGrid, vec![cols; rows])
    }

    /// Wrapped grid holding `total` items in rows of width `cols`.
    pub fn wrapped(total: usize, cols: usize) -> Result<Self> {
        if cols == 0 || total == 0 {
            return Err(Error::InvalidLayout(
                "wrapped grid needs positive width and total".into(),
            ));
        }
        let mut rows = vec![cols; total / cols];
        if !total.is_multiple_of(cols) {
            rows.push(total % cols);
        }
        Self::new(LayoutKind::WrappedGrid, rows)
    }

    pub fn kind(&self) -> LayoutKind {
        self.kind
    }

    pub fn row_lengths(&self) -> &[usize] {
        &self.row_lengths
    }

    pub fn rows(&self) -> usize {
        self.row_lengths.len()
    }

    /// Total number of cells, N.
    pub fn len(&self) -> usize {
        self.row_offsets.last().unwrap() + self.row_lengths.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// 1-based ranks held by `row` (1-based).
    pub fn row_ranks(&self, row: usize) -> std::ops::RangeInclusive<usize> {
        let start = self.row_offsets[row - 1];
        start + 1..=start + self.row_lengths[row - 1]
    }

    pub fn rank_to_cell(&self, rank: usize) -> Result<CellAddress> {
        let n = self.len();
        if rank == 0 || rank > n {
            return Err(Error::RankOutOfRange { rank, n });
        }
        // last row whose offset is < rank
        let row = self.row_offsets.partition_point(|&off| off < rank);
        Ok(CellAddress {
            row,
            col: rank - self.row_offsets[row - 1],
        })
    }

    pub fn cell_to_rank(&self, cell: CellAddress) -> Result<usize> {
        let CellAddress { row, col } = cell;
        if row == 0 || row > self.rows() || col == 0 || col > self.row_lengths[row - 1] {
            return Err(Error::InvalidCell { row, col });
        }
        Ok(self.row_offsets[row - 1] + col)
    }

    /// Iterates `(rank, cell)` pairs in reading order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, CellAddress)> + '_ {
        self.row_lengths
            .iter()
            .enumerate()
            .flat_map(move |(k, &w)| {
                (1..=w).map(move |c| (self.row_offsets[k] + c, CellAddress::new(k + 1, c)))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn first_rank_is_top_left() {
        for layout in [
            LayoutSpec::linear_vertical(4).unwrap(),
            LayoutSpec::linear_horizontal(5).unwrap(),
            LayoutSpec::grid(2, 3).unwrap(),
            LayoutSpec::new(LayoutKind::MultiList, vec![2, 4, 3]).unwrap(),
        ] {
            assert_eq!(layout.rank_to_cell(1).unwrap(), CellAddress::new(1, 1));
            assert_eq!(layout.cell_to_rank(CellAddress::new(1, 1)).unwrap(), 1);
        }
    }

    #[test]
    fn row_major_examples() {
        let grid = LayoutSpec::grid(2, 3).unwrap();
        assert_eq!(grid.rank_to_cell(4).unwrap(), CellAddress::new(2, 1));
        assert_eq!(grid.cell_to_rank(CellAddress::new(2, 2)).unwrap(), 5);

        let row = LayoutSpec::linear_horizontal(5).unwrap();
        assert_eq!(row.rank_to_cell(3).unwrap(), CellAddress::new(1, 3));

        let multi = LayoutSpec::new(LayoutKind::MultiList, vec![2, 4, 3]).unwrap();
        assert_eq!(multi.cell_to_rank(CellAddress::new(3, 3)).unwrap(), 9);
        assert_eq!(multi.len(), 9);
    }

    #[test]
    fn out_of_range() {
        let grid = LayoutSpec::grid(2, 2).unwrap();
        assert_eq!(
            grid.rank_to_cell(5),
            Err(Error::RankOutOfRange { rank: 5, n: 4 })
        );
        assert!(grid.rank_to_cell(0).is_err());
        assert!(grid.cell_to_rank(CellAddress::new(3, 1)).is_err());
        assert!(grid.cell_to_rank(CellAddress::new(1, 3)).is_err());
        assert!(grid.cell_to_rank(CellAddress::new(0, 1)).is_err());
    }

    #[test]
    fn kind_invariants() {
        assert!(LayoutSpec::new(LayoutKind::LinearVertical, vec![1, 2]).is_err());
        assert!(LayoutSpec::new(LayoutKind::LinearHorizontal, vec![3, 3]).is_err());
        assert!(LayoutSpec::new(LayoutKind::WrappedGrid, vec![3, 2, 3]).is_err());
        assert!(LayoutSpec::new(LayoutKind::WrappedGrid, vec![3, 4]).is_err());
        assert!(LayoutSpec::new(LayoutKind::WrappedGrid, vec![3, 3, 1]).is_ok());
        assert!(LayoutSpec::new(LayoutKind::MultiList, vec![]).is_err());
        assert!(LayoutSpec::new(LayoutKind::MultiList, vec![2, 0]).is_err());
        assert_eq!(LayoutSpec::wrapped(7, 3).unwrap().row_lengths(), &[3, 3, 1]);
    }

    #[test]
    fn unit_width_grid_matches_linear_vertical() {
        let vertical = LayoutSpec::linear_vertical(6).unwrap();
        let grid = LayoutSpec::new(LayoutKind::WrappedGrid, vec![1; 6]).unwrap();
        for i in 1..=6 {
            assert_eq!(vertical.rank_to_cell(i).unwrap(), CellAddress::new(i, 1));
            assert_eq!(
                grid.rank_to_cell(i).unwrap(),
                vertical.rank_to_cell(i).unwrap()
            );
        }
    }

    proptest! {
        #[test]
        fn rank_cell_bijection(rows in prop::collection::vec(1usize..6, 1..6)) {
            let layout = LayoutSpec::new(LayoutKind::MultiList, rows.clone()).unwrap();
            let n: usize = rows.iter().sum();
            prop_assert_eq!(layout.len(), n);
            for i in 1..=n {
                let cell = layout.rank_to_cell(i).unwrap();
                prop_assert_eq!(layout.cell_to_rank(cell).unwrap(), i);
            }
            for (k, &w) in rows.iter().enumerate() {
                for c in 1..=w {
                    let cell = CellAddress::new(k + 1, c);
                    prop_assert_eq!(layout.rank_to_cell(layout.cell_to_rank(cell).unwrap()).unwrap(), cell);
                }
            }
            let listed: Vec<usize> = layout.cells().map(|(r, _)| r).collect();
            prop_assert_eq!(listed, (1..=n).collect::<Vec<_>>());
        }
    }
}
