use serde::Serialize;

use super::ChartError;
use crate::decisions::SubscribedStatus;
use crate::filters::View;
use crate::ingest::JournalRecord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Equal-width bins spanning `[lo, lo + n * width]`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Edges {
    lo: f64,
    width: f64,
    count: usize,
    max: f64,
}

impl Edges {
    pub(crate) fn new(lo: f64, width: f64, count: usize, max: f64) -> Self {
        Edges {
            lo,
            width,
            count,
            max,
        }
    }

    pub(crate) fn lower(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.width
    }

    /// Upper edge; the last bin closes on the data maximum.
    pub(crate) fn upper(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.lower(i + 1)
        }
    }

    /// Bins are `[lower, upper)` except the last, which is closed.
    pub(crate) fn index(&self, v: f64) -> usize {
        if self.count <= 1 || self.width <= 0.0 {
            return 0;
        }
        let last = self.count - 1;
        let mut i = (((v - self.lo) / self.width).floor().max(0.0) as usize).min(last);
        while i > 0 && v < self.lower(i) {
            i -= 1;
        }
        while i < last && v >= self.lower(i + 1) {
            i += 1;
        }
        i
    }
}

fn extent(values: &[f64]) -> Option<(f64, f64)> {
    values.iter().fold(None, |acc, &v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

pub(crate) fn histogram_edges(values: &[f64], bin_count: usize) -> Result<Edges, ChartError> {
    if bin_count == 0 {
        return Err(ChartError::InvalidBinCount(bin_count));
    }
    let (lo, hi) = extent(values).ok_or(ChartError::EmptyInput)?;
    if lo == hi {
        return Ok(Edges::new(lo, 0.0, 1, hi));
    }
    Ok(Edges::new(lo, (hi - lo) / bin_count as f64, bin_count, hi))
}

/// Equal-width histogram over `[min, max]`. When every value is equal the
/// extent is degenerate and a single bin holds everything.
pub fn histogram_bins(values: &[f64], bin_count: usize) -> Result<Vec<Bin>, ChartError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(ChartError::NonFiniteInput);
    }
    let edges = histogram_edges(values, bin_count)?;
    let mut bins: Vec<Bin> = (0..edges.count)
        .map(|i| Bin {
            lo: edges.lower(i),
            hi: edges.upper(i),
            count: 0,
        })
        .collect();
    for &v in values {
        bins[edges.index(v)].count += 1;
    }
    Ok(bins)
}

/// One title in the cost-per-use box chart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CpuBox {
    pub key: String,
    pub title: String,
    pub cpu: Option<f64>,
    pub cpu_rank: u32,
    pub status: SubscribedStatus,
    pub color: &'static str,
    /// Position within the column, 0 at the bottom.
    pub stack: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxColumn {
    pub lo: f64,
    pub hi: f64,
    pub boxes: Vec<CpuBox>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxGrid {
    pub bin_width: f64,
    pub columns: Vec<BoxColumn>,
    /// Titles without a cost-per-use (zero usage), stacked by rank.
    pub unbinned: Vec<CpuBox>,
}

impl BoxGrid {
    pub fn box_count(&self) -> usize {
        self.columns.iter().map(|c| c.boxes.len()).sum::<usize>() + self.unbinned.len()
    }
}

fn to_box(record: &JournalRecord, cpu: Option<f64>, cpu_rank: u32) -> CpuBox {
    CpuBox {
        key: record.key.clone(),
        title: record.title.clone(),
        cpu,
        cpu_rank,
        status: record.subscribed,
        color: record.subscribed.color(),
        stack: 0,
    }
}

fn fill_grid(view: &View<'_>, edges: Option<Edges>, bin_width: f64) -> BoxGrid {
    let mut columns: Vec<BoxColumn> = match edges {
        Some(e) => (0..e.count)
            .map(|i| BoxColumn {
                lo: e.lower(i),
                hi: e.upper(i),
                boxes: Vec::new(),
            })
            .collect(),
        None => Vec::new(),
    };
    let mut unbinned = Vec::new();
    for (record, m) in view.iter() {
        let b = to_box(record, m.cpu, m.cpu_rank);
        match (m.cpu, edges) {
            (Some(cpu), Some(e)) => columns[e.index(cpu)].boxes.push(b),
            _ => unbinned.push(b),
        }
    }
    for column in columns.iter_mut().map(|c| &mut c.boxes).chain(std::iter::once(&mut unbinned)) {
        column.sort_by_key(|b| b.cpu_rank);
        for (i, b) in column.iter_mut().enumerate() {
            b.stack = i;
        }
    }
    BoxGrid {
        bin_width,
        columns,
        unbinned,
    }
}

fn view_cpus(view: &View<'_>) -> Vec<f64> {
    view.iter().filter_map(|(_, m)| m.cpu).collect()
}

/// Groups titles into cost-per-use columns of the given width, anchored at
/// the smallest cost-per-use in the view.
pub fn cpu_boxes(view: &View<'_>, bin_width: f64) -> Result<BoxGrid, ChartError> {
    if !(bin_width.is_finite() && bin_width > 0.0) {
        return Err(ChartError::InvalidBinWidth(bin_width));
    }
    let cpus = view_cpus(view);
    let edges = extent(&cpus).map(|(lo, hi)| {
        let span = hi - lo;
        let mut count = ((span / bin_width).ceil() as usize).max(1);
        while count > 1 && (count - 1) as f64 * bin_width >= span {
            count -= 1;
        }
        Edges::new(lo, bin_width, count, hi)
    });
    Ok(fill_grid(view, edges, bin_width))
}

/// Same as [`cpu_boxes`] with the width chosen to give `bin_count` columns.
pub fn cpu_boxes_with_count(view: &View<'_>, bin_count: usize) -> Result<BoxGrid, ChartError> {
    if bin_count == 0 {
        return Err(ChartError::InvalidBinCount(bin_count));
    }
    let cpus = view_cpus(view);
    let edges = match extent(&cpus) {
        Some(_) => Some(histogram_edges(&cpus, bin_count)?),
        None => None,
    };
    let width = edges.map(|e| e.width).unwrap_or(0.0);
    Ok(fill_grid(view, edges, width))
}
