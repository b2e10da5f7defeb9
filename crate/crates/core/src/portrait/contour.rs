//! Marching squares on a rectilinear grid.
//!
//! A corner is "above" when its value is strictly greater than the level.
//! Ambiguous saddle cells are resolved with the mean of the four corners.
//! Segment endpoints are identified by the grid edge they lie on, so chaining
//! into polylines is exact.

use std::collections::HashMap;
use std::io::Write;

use super::PortraitGrid;
use crate::error::Result;

/// Vertices in data coordinates. Closed curves repeat their first vertex.
pub type Polyline = Vec<(f64, f64)>;

#[derive(Debug, Clone, PartialEq)]
pub struct LevelContours {
    pub level: f64,
    pub is_separatrix: bool,
    pub polylines: Vec<Polyline>,
}

impl LevelContours {
    pub fn write_csv<W: Write>(all: &[LevelContours], mut w: W) -> Result<()> {
        writeln!(w, "level,polyline_id,phi,p_phi")?;
        let mut id = 0usize;
        for lc in all {
            for line in &lc.polylines {
                for (x, y) in line {
                    writeln!(w, "{},{id},{x},{y}", lc.level)?;
                }
                id += 1;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Edge {
    /// `(i, j)` to `(i + 1, j)`
    AlongX(usize, usize),
    /// `(i, j)` to `(i, j + 1)`
    AlongY(usize, usize),
}

fn edge_point(xs: &[f64], ys: &[f64], values: &[Vec<f64>], level: f64, edge: Edge) -> (f64, f64) {
    let (i0, j0, i1, j1) = match edge {
        Edge::AlongX(i, j) => (i, j, i + 1, j),
        Edge::AlongY(i, j) => (i, j, i, j + 1),
    };
    let (v0, v1) = (values[i0][j0], values[i1][j1]);
    let t = if v1 == v0 {
        0.5
    } else {
        (level - v0) / (v1 - v0)
    };
    (
        xs[i0] + t * (xs[i1] - xs[i0]),
        ys[j0] + t * (ys[j1] - ys[j0]),
    )
}

/// Level set `values == level` as chained polylines.
pub fn march(xs: &[f64], ys: &[f64], values: &[Vec<f64>], level: f64) -> Vec<Polyline> {
    let nx = xs.len();
    let ny = ys.len();
    if nx < 2 || ny < 2 {
        return Vec::new();
    }
    let above = |i: usize, j: usize| values[i][j] > level;

    let mut segments: Vec<(Edge, Edge)> = Vec::new();
    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            let bottom = Edge::AlongX(i, j);
            let right = Edge::AlongY(i + 1, j);
            let top = Edge::AlongX(i, j + 1);
            let left = Edge::AlongY(i, j);
            let case = (above(i, j) as u8)
                | (above(i + 1, j) as u8) << 1
                | (above(i + 1, j + 1) as u8) << 2
                | (above(i, j + 1) as u8) << 3;
            match case {
                0 | 15 => {}
                1 | 14 => segments.push((left, bottom)),
                2 | 13 => segments.push((bottom, right)),
                3 | 12 => segments.push((left, right)),
                4 | 11 => segments.push((right, top)),
                6 | 9 => segments.push((bottom, top)),
                7 | 8 => segments.push((top, left)),
                5 | 10 => {
                    let centre = 0.25
                        * (values[i][j]
                            + values[i + 1][j]
                            + values[i + 1][j + 1]
                            + values[i][j + 1]);
                    // isolate the corners on the opposite side from the centre
                    let isolate_odd = (centre > level) == (case == 5);
                    if isolate_odd {
                        segments.push((bottom, right));
                        segments.push((top, left));
                    } else {
                        segments.push((left, bottom));
                        segments.push((right, top));
                    }
                }
                _ => unreachable!(),
            }
        }
    }

    let mut incident: HashMap<Edge, Vec<usize>> = HashMap::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        incident.entry(*a).or_default().push(k);
        incident.entry(*b).or_default().push(k);
    }

    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    let chain_from = |start: usize, from: Edge, used: &mut Vec<bool>| -> Vec<Edge> {
        let mut edges = vec![from];
        let mut seg = start;
        let mut at = from;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            edges.push(next);
            at = next;
            match incident[&at].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        edges
    };

    // open curves start at an edge touched by a single segment
    for k in 0..segments.len() {
        if used[k] {
            continue;
        }
        let (a, b) = segments[k];
        let start = if incident[&a].len() == 1 {
            Some(a)
        } else if incident[&b].len() == 1 {
            Some(b)
        } else {
            None
        };
        if let Some(from) = start {
            lines.push(chain_from(k, from, &mut used));
        }
    }
    for k in 0..segments.len() {
        if !used[k] {
            let from = segments[k].0;
            lines.push(chain_from(k, from, &mut used));
        }
    }

    lines
        .into_iter()
        .map(|edges| {
            edges
                .into_iter()
                .map(|e| edge_point(xs, ys, values, level, e))
                .collect()
        })
        .collect()
}

/// Level sets of the grid for every level it carries.
pub fn extract_contours(grid: &PortraitGrid) -> Vec<LevelContours> {
    grid.levels
        .iter()
        .map(|&level| LevelContours {
            level,
            is_separatrix: grid.separatrix == Some(level),
            polylines: march(&grid.phi, &grid.p, &grid.values, level),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }

    fn sample(xs: &[f64], ys: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<Vec<f64>> {
        xs.iter()
            .map(|&x| ys.iter().map(|&y| f(x, y)).collect())
            .collect()
    }

    #[test]
    fn constant_field_has_no_contours() {
        let xs = axis(10, 0.0, 1.0);
        let v = sample(&xs, &xs, |_, _| 3.0);
        assert!(march(&xs, &xs, &v, 2.0).is_empty());
        assert!(march(&xs, &xs, &v, 4.0).is_empty());
    }

    #[test]
    fn bowl_gives_closed_circle() {
        let n = 64;
        let xs = axis(n, -1.5, 1.5);
        let v = sample(&xs, &xs, |x, y| 0.5 * (x * x + y * y));
        let lines = march(&xs, &xs, &v, 0.5);
        assert_eq!(lines.len(), 1);
        let line = &lines[0];
        assert_eq!(line.first(), line.last());
        let dev = line
            .iter()
            .map(|(x, y)| ((x * x + y * y).sqrt() - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(dev < 2.0 / n as f64, "deviation {dev}");
    }

    #[test]
    fn open_curve_across_domain() {
        let xs = axis(8, 0.0, 1.0);
        let v = sample(&xs, &xs, |x, _| x);
        let lines = march(&xs, &xs, &v, 0.3);
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].len(), 8);
        assert!(lines[0].iter().all(|(x, _)| (x - 0.3).abs() < 1e-12));
    }

    #[test]
    fn saddle_cell_follows_centre_value() {
        // corners: (0,0)=1 (1,0)=0 (1,1)=1 (0,1)=0, centre 0.5
        let xs = vec![0.0, 1.0];
        let v = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        // centre above 0.4: high corners joined, low corners isolated
        let lines = march(&xs, &xs, &v, 0.4);
        assert_eq!(lines.len(), 2);
        for l in &lines {
            let (mx, my) = ((l[0].0 + l[1].0) / 2.0, (l[0].1 + l[1].1) / 2.0);
            // both segments sit near the (1,0) or (0,1) corners
            assert!((mx - my).abs() > 0.5, "{l:?}");
        }
        let lines = march(&xs, &xs, &v, 0.6);
        for l in &lines {
            let (mx, my) = ((l[0].0 + l[1].0) / 2.0, (l[0].1 + l[1].1) / 2.0);
            assert!((mx - my).abs() < 1e-12, "{l:?}");
        }
    }

    #[test]
    fn contour_csv() {
        let lc = LevelContours {
            level: 0.5,
            is_separatrix: false,
            polylines: vec![vec![(0.0, 1.0), (1.0, 1.0)], vec![(2.0, 0.0)]],
        };
        let mut buf = Vec::new();
        LevelContours::write_csv(&[lc], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "level,polyline_id,phi,p_phi\n0.5,0,0,1\n0.5,0,1,1\n0.5,1,2,0\n"
        );
    }
}
