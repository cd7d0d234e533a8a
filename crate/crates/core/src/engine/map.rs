//! Grid geometry: cells are 1.0 world unit squares, cell `(ix, iy)` covers
//! `[ix, ix + 1) x [iy, iy + 1)`. `y` grows with the ASCII row index.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Surface {
    Normal,
    Acid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    Wall(u8),
    Floor(Surface),
}

impl CellKind {
    pub fn is_wall(self) -> bool {
        matches!(self, CellKind::Wall(_))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapError {
    #[error("map must be at least 3x3 cells, got {width}x{height}")]
    TooSmall { width: usize, height: usize },
    #[error("cell count {got} does not match {width}x{height}")]
    CellCount { width: usize, height: usize, got: usize },
    #[error("boundary cell ({x}, {y}) is not a wall")]
    Unenclosed { x: usize, y: usize },
}

/// Which face of a wall cell a ray entered through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    North,
    South,
    East,
    West,
}

impl Side {
    /// Faces hit while stepping along y (north/south) are shaded darker.
    pub fn is_ns(self) -> bool {
        matches!(self, Side::North | Side::South)
    }
}

/// First wall crossed by a ray, as found by [`GridMap::trace`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallHit {
    /// Euclidean distance along the (unit) ray direction.
    pub distance: f64,
    pub cell: (usize, usize),
    pub texture: u8,
    pub side: Side,
    /// Horizontal texture coordinate on the hit face, in `[0, 1)`.
    pub wall_x: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridMap {
    width: usize,
    height: usize,
    cells: Vec<CellKind>,
}

impl GridMap {
    pub fn new(width: usize, height: usize, cells: Vec<CellKind>) -> Result<Self, MapError> {
        if width < 3 || height < 3 {
            return Err(MapError::TooSmall { width, height });
        }
        if cells.len() != width * height {
            return Err(MapError::CellCount { width, height, got: cells.len() });
        }
        let map = GridMap { width, height, cells };
        for y in 0..height {
            for x in 0..width {
                let border = x == 0 || y == 0 || x == width - 1 || y == height - 1;
                if border && !map.cell(x, y).is_wall() {
                    return Err(MapError::Unenclosed { x, y });
                }
            }
        }
        Ok(map)
    }

    /// An empty room: wall border around normal floor.
    pub fn room(width: usize, height: usize) -> Result<Self, MapError> {
        let mut cells = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let border = x == 0 || y == 0 || x + 1 == width || y + 1 == height;
                cells.push(if border { CellKind::Wall(0) } else { CellKind::Floor(Surface::Normal) });
            }
        }
        GridMap::new(width, height, cells)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell(&self, x: usize, y: usize) -> CellKind {
        self.cells[y * self.width + x]
    }

    pub fn set_cell(&mut self, x: usize, y: usize, kind: CellKind) {
        let border = x == 0 || y == 0 || x + 1 == self.width || y + 1 == self.height;
        assert!(!border || kind.is_wall(), "boundary cells must stay walls");
        self.cells[y * self.width + x] = kind;
    }

    /// Out-of-range integer coordinates count as solid.
    pub fn is_wall(&self, x: i64, y: i64) -> bool {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            return true;
        }
        self.cell(x as usize, y as usize).is_wall()
    }

    pub fn cell_at(&self, pos: (f64, f64)) -> Option<(usize, usize)> {
        let (x, y) = (pos.0.floor(), pos.1.floor());
        if x < 0.0 || y < 0.0 || x as usize >= self.width || y as usize >= self.height {
            return None;
        }
        Some((x as usize, y as usize))
    }

    pub fn is_wall_at(&self, pos: (f64, f64)) -> bool {
        match self.cell_at(pos) {
            Some((x, y)) => self.cell(x, y).is_wall(),
            None => true,
        }
    }

    pub fn surface_at(&self, pos: (f64, f64)) -> Option<Surface> {
        let (x, y) = self.cell_at(pos)?;
        match self.cell(x, y) {
            CellKind::Floor(s) => Some(s),
            CellKind::Wall(_) => None,
        }
    }

    /// Exact circle-vs-wall test: true when some wall cell's closed square is
    /// strictly closer than `radius` to `center`. Touching does not overlap.
    pub fn circle_overlaps_wall(&self, center: (f64, f64), radius: f64) -> bool {
        let x0 = (center.0 - radius).floor() as i64;
        let x1 = (center.0 + radius).floor() as i64;
        let y0 = (center.1 - radius).floor() as i64;
        let y1 = (center.1 + radius).floor() as i64;
        for cy in y0..=y1 {
            for cx in x0..=x1 {
                if !self.is_wall(cx, cy) {
                    continue;
                }
                let nx = center.0.clamp(cx as f64, cx as f64 + 1.0);
                let ny = center.1.clamp(cy as f64, cy as f64 + 1.0);
                let (dx, dy) = (center.0 - nx, center.1 - ny);
                if dx * dx + dy * dy < radius * radius {
                    return true;
                }
            }
        }
        false
    }

    /// Floor cells in row-major order.
    pub fn floor_cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                if !self.cell(x, y).is_wall() {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Integer-grid DDA from `origin` along the unit direction `dir`.
    /// Boundary walls guarantee termination for any origin inside the map.
    pub fn trace(&self, origin: (f64, f64), dir: (f64, f64)) -> WallHit {
        let mut map_x = origin.0.floor() as i64;
        let mut map_y = origin.1.floor() as i64;
        let delta_x = if dir.0 == 0.0 { f64::INFINITY } else { (1.0 / dir.0).abs() };
        let delta_y = if dir.1 == 0.0 { f64::INFINITY } else { (1.0 / dir.1).abs() };
        let (step_x, mut side_x) = if dir.0 < 0.0 {
            (-1, (origin.0 - map_x as f64) * delta_x)
        } else {
            (1, (map_x as f64 + 1.0 - origin.0) * delta_x)
        };
        let (step_y, mut side_y) = if dir.1 < 0.0 {
            (-1, (origin.1 - map_y as f64) * delta_y)
        } else {
            (1, (map_y as f64 + 1.0 - origin.1) * delta_y)
        };

        loop {
            let x_step = side_x < side_y;
            if x_step {
                map_x += step_x;
                side_x += delta_x;
            } else {
                map_y += step_y;
                side_y += delta_y;
            }
            if !self.is_wall(map_x, map_y) {
                continue;
            }
            let (distance, side) = if x_step {
                (side_x - delta_x, if step_x > 0 { Side::West } else { Side::East })
            } else {
                (side_y - delta_y, if step_y > 0 { Side::North } else { Side::South })
            };
            let along = if x_step { origin.1 + distance * dir.1 } else { origin.0 + distance * dir.0 };
            let mut wall_x = along - along.floor();
            // Mirror so that texture u runs left-to-right as seen by the viewer.
            if (x_step && dir.0 < 0.0) || (!x_step && dir.1 > 0.0) {
                wall_x = 1.0 - wall_x;
            }
            if wall_x >= 1.0 {
                wall_x = 0.0;
            }
            let texture = match self.cell_checked(map_x, map_y) {
                Some(CellKind::Wall(t)) => t,
                _ => 0,
            };
            let cell = (map_x.max(0) as usize, map_y.max(0) as usize);
            return WallHit { distance, cell, texture, side, wall_x };
        }
    }

    fn cell_checked(&self, x: i64, y: i64) -> Option<CellKind> {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            None
        } else {
            Some(self.cell(x as usize, y as usize))
        }
    }
}
