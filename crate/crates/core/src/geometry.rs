//! Random node placement in a disk and distance queries.

use std::f64::consts::TAU;
use std::io::{BufRead, Write};

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }
}

/// Node positions inside a disk centred on the origin.
///
/// Immutable once built; share it freely between worker threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    positions: Vec<Point>,
    radius: f64,
}

impl Topology {
    /// Places `node_count` nodes independently and uniformly by area in a
    /// disk of the given radius.
    pub fn generate<R: Rng + ?Sized>(node_count: usize, radius: f64, rng: &mut R) -> Result<Self> {
        validate_shape(node_count, radius)?;
        let positions = (0..node_count)
            .map(|_| {
                // sqrt(u) makes the density uniform in area, not in radius.
                let rho = radius * rng.random::<f64>().sqrt();
                let theta = TAU * rng.random::<f64>();
                Point::new(rho * theta.cos(), rho * theta.sin())
            })
            .collect();
        Ok(Topology { positions, radius })
    }

    /// Builds a topology from explicit coordinates, checking they all lie
    /// inside the disk.
    pub fn from_positions(positions: Vec<Point>, radius: f64) -> Result<Self> {
        validate_shape(positions.len(), radius)?;
        if let Some((i, p)) = positions
            .iter()
            .enumerate()
            .find(|(_, p)| !p.x.is_finite() || !p.y.is_finite() || p.x * p.x + p.y * p.y > radius * radius)
        {
            return Err(Error::InvalidConfig(format!(
                "node {i} at ({}, {}) lies outside the disk of radius {radius}",
                p.x, p.y
            )));
        }
        Ok(Topology { positions, radius })
    }

    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn position(&self, i: usize) -> Result<Point> {
        self.positions
            .get(i)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index: i,
                node_count: self.node_count(),
            })
    }

    /// Euclidean distance between nodes `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        Ok(self.position(i)?.distance(self.position(j)?))
    }

    pub fn distance_to_center(&self, i: usize) -> Result<f64> {
        Ok(self.position(i)?.norm())
    }

    /// Row-major `node_count × node_count` table of pairwise distances,
    /// value-identical to [`Topology::distance`].
    pub fn distance_matrix(&self) -> Vec<f64> {
        let m = self.node_count();
        let mut out = vec![0.0; m * m];
        for i in 0..m {
            for j in 0..m {
                out[i * m + j] = self.positions[i].distance(self.positions[j]);
            }
        }
        out
    }

    /// Writes `node_id,x,y` rows (with a header line).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "node_id,x,y")?;
        for (i, p) in self.positions.iter().enumerate() {
            writeln!(w, "{i},{},{}", p.x, p.y)?;
        }
        Ok(())
    }

    /// Reads the format produced by [`Topology::write_csv`]. Rows must be
    /// listed in node order starting at 0.
    pub fn read_csv<R: BufRead>(r: R, radius: f64) -> Result<Self> {
        let mut positions = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::TopologyCsv {
                line: lineno,
                message: e.to_string(),
            })?;
            let line = line.trim();
            if line.is_empty() || (idx == 0 && line.starts_with("node_id")) {
                continue;
            }
            let bad = |message: String| Error::TopologyCsv {
                line: lineno,
                message,
            };
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(bad(format!("expected 3 fields, got {}", fields.len())));
            }
            let id: usize = fields[0]
                .trim()
                .parse()
                .map_err(|e| bad(format!("node_id: {e}")))?;
            if id != positions.len() {
                return Err(bad(format!(
                    "expected node_id {}, got {id}",
                    positions.len()
                )));
            }
            let x: f64 = fields[1].trim().parse().map_err(|e| bad(format!("x: {e}")))?;
            let y: f64 = fields[2].trim().parse().map_err(|e| bad(format!("y: {e}")))?;
            positions.push(Point::new(x, y));
        }
        Topology::from_positions(positions, radius)
    }
}

fn validate_shape(node_count: usize, radius: f64) -> Result<()> {
    if node_count < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 nodes, got {node_count}"
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "radius must be positive, got {radius}"
        )));
    }
    Ok(())
}
