//! Uniform-bin histograms over the real line.
//!
//! A [`BinGrid`] covers `[lo, lo + width * bins)`; mass that falls outside the
//! grid is kept in two tail cells so that no mass is ever dropped.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinGrid {
    lo: f64,
    width: f64,
    bins: usize,
}

impl BinGrid {
    pub fn new(lo: f64, width: f64, bins: usize) -> Result<Self> {
        if !lo.is_finite() || !(width > 0.0) || !width.is_finite() || bins == 0 {
            return domain(format!("invalid bin grid lo={lo} width={width} bins={bins}"));
        }
        Ok(BinGrid { lo, width, bins })
    }

    /// Smallest grid of the given width starting at `lo` whose upper edge is
    /// at least `hi`.
    pub fn covering(lo: f64, hi: f64, width: f64) -> Result<Self> {
        if !(hi > lo) {
            return domain(format!("grid upper edge {hi} must exceed {lo}"));
        }
        let bins = ((hi - lo) / width).ceil().max(1.0) as usize;
        Self::new(lo, width, bins)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.edge(self.bins)
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn edge(&self, k: usize) -> f64 {
        self.lo + self.width * k as f64
    }

    pub fn center(&self, k: usize) -> f64 {
        self.lo + self.width * (k as f64 + 0.5)
    }

    #[inline]
    fn slot(&self, x: f64) -> Slot {
        let pos = (x - self.lo) / self.width;
        if pos < 0.0 {
            Slot::Below
        } else if pos >= self.bins as f64 {
            Slot::Above
        } else {
            Slot::Bin(pos as usize)
        }
    }
}

enum Slot {
    Below,
    Bin(usize),
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    grid: BinGrid,
    mass: Vec<f64>,
    below: f64,
    above: f64,
}

impl Histogram {
    pub fn new(grid: BinGrid) -> Self {
        Histogram { grid, mass: vec![0.0; grid.bins], below: 0.0, above: 0.0 }
    }

    pub fn grid(&self) -> &BinGrid {
        &self.grid
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    /// Mass below the grid's lower edge.
    pub fn below(&self) -> f64 {
        self.below
    }

    /// Mass at or above the grid's upper edge.
    pub fn above(&self) -> f64 {
        self.above
    }

    #[inline]
    pub fn add_point(&mut self, x: f64, w: f64) {
        match self.grid.slot(x) {
            Slot::Below => self.below += w,
            Slot::Bin(k) => self.mass[k] += w,
            Slot::Above => self.above += w,
        }
    }

    /// Spreads `w` uniformly over `[a, b]`, apportioning by overlap length.
    /// This is exact for the occupation time of a linear path segment.
    pub fn add_interval(&mut self, a: f64, b: f64, w: f64) {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let len = b - a;
        if len == 0.0 {
            self.add_point(a, w);
            return;
        }
        let density = w / len;
        let (glo, ghi) = (self.grid.lo, self.grid.hi());
        if a < glo {
            self.below += density * (b.min(glo) - a);
        }
        if b > ghi {
            self.above += density * (b - a.max(ghi));
        }
        let lo = a.max(glo);
        let hi = b.min(ghi);
        if hi <= lo {
            return;
        }
        let first = (((lo - glo) / self.grid.width) as usize).min(self.grid.bins - 1);
        let last = (((hi - glo) / self.grid.width).ceil() as usize).min(self.grid.bins);
        for k in first..last {
            let overlap = hi.min(self.grid.edge(k + 1)) - lo.max(self.grid.edge(k));
            if overlap > 0.0 {
                self.mass[k] += density * overlap;
            }
        }
    }

    pub fn total(&self) -> f64 {
        self.below + self.mass.iter().sum::<f64>() + self.above
    }

    pub fn scale(&mut self, f: f64) {
        self.below *= f;
        self.above *= f;
        for m in &mut self.mass {
            *m *= f;
        }
    }

    pub fn add(&mut self, other: &Histogram) -> Result<()> {
        self.check_grid(other)?;
        self.below += other.below;
        self.above += other.above;
        for (m, o) in self.mass.iter_mut().zip(&other.mass) {
            *m += o;
        }
        Ok(())
    }

    /// `self * wa + other * wb`, used by replication-weighted averaging.
    pub fn blend(&self, wa: f64, other: &Histogram, wb: f64) -> Result<Histogram> {
        self.check_grid(other)?;
        let mut out = Histogram::new(self.grid);
        out.below = self.below * wa + other.below * wb;
        out.above = self.above * wa + other.above * wb;
        for ((o, a), b) in out.mass.iter_mut().zip(&self.mass).zip(&other.mass) {
            *o = a * wa + b * wb;
        }
        Ok(out)
    }

    fn check_grid(&self, other: &Histogram) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::Mismatch(format!(
                "bin grids differ: {:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }

    /// Mass outside `[-m, m]`. Bins straddling `±m` contribute the fraction of
    /// their width lying outside. Tail cells count as outside unless the whole
    /// tail region lies inside `[-m, m]`, which cannot happen for an unbounded
    /// tail, so they always count.
    pub fn mass_outside(&self, m: f64) -> f64 {
        let mut out = self.below + self.above;
        let w = self.grid.width;
        for (k, &mass) in self.mass.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let (lo, hi) = (self.grid.edge(k), self.grid.edge(k + 1));
            let inside = (hi.min(m) - lo.max(-m)).max(0.0);
            out += mass * (1.0 - inside / w);
        }
        out
    }

    /// Midpoint-rule integral of `f`. Tail cells are evaluated at the nearest
    /// grid edge.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let mut acc = self.below * f(self.grid.lo) + self.above * f(self.grid.hi());
        for (k, &mass) in self.mass.iter().enumerate() {
            if mass != 0.0 {
                acc += mass * f(self.grid.center(k));
            }
        }
        acc
    }
}
