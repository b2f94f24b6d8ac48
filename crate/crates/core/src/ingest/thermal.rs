//! Thermal variation map over a uniform tile grid.
//!
//! ```text
//! grid <cols> <rows> <tile_mm>
//! v v v ... cols values      # row 0 covers y in [0, tile)
//! ...                        # rows lines total
//! ```
//!
//! Values are |dT| magnitudes in degrees C and must be non-negative. Point
//! lookups use the containing tile; no interpolation.

use super::{parse_num, tokenize, ParseError};
use crate::geom::Orientation;

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalProfile {
    pub cols: usize,
    pub rows: usize,
    pub tile_mm: f64,
    /// Row-major, `rows * cols` entries, row 0 at y = 0.
    pub values: Vec<f64>,
}

impl ThermalProfile {
    pub fn uniform(cols: usize, rows: usize, tile_mm: f64, value: f64) -> Self {
        ThermalProfile { cols, rows, tile_mm, values: vec![value; cols * rows] }
    }

    pub fn at_tile(&self, col: usize, row: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn at_tile_mut(&mut self, col: usize, row: usize) -> &mut f64 {
        &mut self.values[row * self.cols + col]
    }

    fn col_of(&self, x: f64) -> usize {
        ((x / self.tile_mm).floor() as isize).clamp(0, self.cols as isize - 1) as usize
    }

    fn row_of(&self, y: f64) -> usize {
        ((y / self.tile_mm).floor() as isize).clamp(0, self.rows as isize - 1) as usize
    }

    /// |dT| of the tile containing (x, y); points on the far edge clamp to
    /// the last tile.
    pub fn lookup(&self, x: f64, y: f64) -> f64 {
        self.at_tile(self.col_of(x), self.row_of(y))
    }

    /// True when the grid extends to at least `w x h`.
    pub fn covers(&self, w: f64, h: f64) -> bool {
        let eps = 1e-9;
        self.cols as f64 * self.tile_mm + eps >= w && self.rows as f64 * self.tile_mm + eps >= h
    }

    /// Largest tile value along an axis-aligned segment at `coord`,
    /// spanning `lo..hi` in the running direction.
    pub fn max_along(&self, dir: Orientation, coord: f64, lo: f64, hi: f64) -> f64 {
        let mut best = 0.0f64;
        self.walk(dir, coord, lo, hi, |v, _len| best = best.max(v));
        best
    }

    /// Integral of |dT| along the segment, degC*mm: sum of tile value times
    /// the segment length inside that tile.
    pub fn integral_along(&self, dir: Orientation, coord: f64, lo: f64, hi: f64) -> f64 {
        let mut sum = 0.0;
        self.walk(dir, coord, lo, hi, |v, len| sum += v * len);
        sum
    }

    fn walk(&self, dir: Orientation, coord: f64, lo: f64, hi: f64, mut f: impl FnMut(f64, f64)) {
        let (fixed_row, n_run) = match dir {
            Orientation::Horizontal => (self.row_of(coord), self.cols),
            Orientation::Vertical => (self.col_of(coord), self.rows),
        };
        if hi <= lo {
            // Degenerate span still touches one tile.
            let v = match dir {
                Orientation::Horizontal => self.at_tile(self.col_of(lo), fixed_row),
                Orientation::Vertical => self.at_tile(fixed_row, self.row_of(lo)),
            };
            f(v, 0.0);
            return;
        }
        let first = ((lo / self.tile_mm).floor() as isize).clamp(0, n_run as isize - 1) as usize;
        let last = (((hi / self.tile_mm).ceil() as isize) - 1).clamp(0, n_run as isize - 1) as usize;
        for k in first..=last {
            let t0 = k as f64 * self.tile_mm;
            let t1 = t0 + self.tile_mm;
            let overlap = (hi.min(t1) - lo.max(t0)).max(0.0);
            if overlap <= 0.0 && !(lo >= t0 && lo < t1) {
                continue;
            }
            let v = match dir {
                Orientation::Horizontal => self.at_tile(k, fixed_row),
                Orientation::Vertical => self.at_tile(fixed_row, k),
            };
            f(v, overlap);
        }
    }
}

pub fn parse_thermal(text: &str) -> Result<ThermalProfile, ParseError> {
    let mut header: Option<(usize, usize, f64)> = None;
    let mut values: Vec<f64> = Vec::new();
    let mut rows_seen = 0usize;

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let toks = tokenize(raw);
        if toks.is_empty() {
            continue;
        }
        match header {
            None => {
                let (kcol, kw) = toks[0];
                if kw != "grid" {
                    return Err(ParseError::new(line, kcol, "expected `grid <cols> <rows> <tile_mm>`"));
                }
                if toks.len() != 4 {
                    return Err(ParseError::new(line, kcol, "expected `grid <cols> <rows> <tile_mm>`"));
                }
                let cols: usize = parse_num(line, toks[1].0, toks[1].1, "grid cols")?;
                let rows: usize = parse_num(line, toks[2].0, toks[2].1, "grid rows")?;
                let tile: f64 = parse_num(line, toks[3].0, toks[3].1, "tile size")?;
                if cols == 0 || rows == 0 {
                    return Err(ParseError::new(line, toks[1].0, "grid must be at least 1 x 1"));
                }
                if !(tile > 0.0) || !tile.is_finite() {
                    return Err(ParseError::new(line, toks[3].0, format!("tile size must be > 0, got {tile}")));
                }
                header = Some((cols, rows, tile));
                values.reserve(cols * rows);
            }
            Some((cols, rows, _)) => {
                if rows_seen == rows {
                    return Err(ParseError::new(line, toks[0].0, format!("expected {rows} value rows, found more")));
                }
                if toks.len() != cols {
                    return Err(ParseError::new(
                        line,
                        toks[0].0,
                        format!("expected {cols} values in row {rows_seen}, got {}", toks.len()),
                    ));
                }
                for (col, tok) in &toks {
                    let v: f64 = parse_num(line, *col, tok, "temperature value")?;
                    if !(v >= 0.0) || !v.is_finite() {
                        return Err(ParseError::new(line, *col, format!("temperature must be >= 0, got {v}")));
                    }
                    values.push(v);
                }
                rows_seen += 1;
            }
        }
    }

    let (cols, rows, tile_mm) = header.ok_or_else(|| ParseError::new(1, 1, "missing grid line"))?;
    if rows_seen != rows {
        return Err(ParseError::new(
            text.lines().count().max(1),
            1,
            format!("expected {rows} value rows, got {rows_seen}"),
        ));
    }
    Ok(ThermalProfile { cols, rows, tile_mm, values })
}

pub fn write_thermal(t: &ThermalProfile) -> String {
    let mut out = format!("grid {} {} {}\n", t.cols, t.rows, t.tile_mm);
    for r in 0..t.rows {
        let row: Vec<String> = (0..t.cols).map(|c| t.at_tile(c, r).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}
