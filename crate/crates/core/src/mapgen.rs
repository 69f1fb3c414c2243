//! Seeded synthetic grid maps in the style of the common benchmark families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::GridMap;

/// Obstacle-free map.
pub fn open(width: usize, height: usize) -> GridMap {
    GridMap::new(width, height, vec![true; width * height])
}

/// Perfect maze carved by randomized depth-first search.
///
/// Corridors are `corridor` cells wide and walls `wall` cells thick. The map
/// is exactly `width x height`; leftover rows and columns are blocked.
pub fn maze(width: usize, height: usize, corridor: usize, wall: usize, seed: u64) -> GridMap {
    assert!(corridor >= 1, "corridor width must be positive");
    let pitch = corridor + wall;
    let cols = width.saturating_sub(wall) / pitch;
    let rows = height.saturating_sub(wall) / pitch;
    let mut map = GridMap::new(width, height, vec![false; width * height]);
    if cols == 0 || rows == 0 {
        return map;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let origin = |c: usize, r: usize| (wall + c * pitch, wall + r * pitch);
    let fill = |map: &mut GridMap, x0: usize, y0: usize, w: usize, h: usize| {
        for y in y0..y0 + h {
            for x in x0..x0 + w {
                map.set_passable(x, y, true);
            }
        }
    };

    let mut visited = vec![false; cols * rows];
    let start = (rng.gen_range(0..cols), rng.gen_range(0..rows));
    let mut stack = vec![start];
    visited[start.1 * cols + start.0] = true;
    let (x, y) = origin(start.0, start.1);
    fill(&mut map, x, y, corridor, corridor);
    while let Some(&(c, r)) = stack.last() {
        let mut options = Vec::with_capacity(4);
        if c > 0 && !visited[r * cols + c - 1] {
            options.push((c - 1, r));
        }
        if c + 1 < cols && !visited[r * cols + c + 1] {
            options.push((c + 1, r));
        }
        if r > 0 && !visited[(r - 1) * cols + c] {
            options.push((c, r - 1));
        }
        if r + 1 < rows && !visited[(r + 1) * cols + c] {
            options.push((c, r + 1));
        }
        if options.is_empty() {
            stack.pop();
            continue;
        }
        let (nc, nr) = options[rng.gen_range(0..options.len())];
        visited[nr * cols + nc] = true;
        let (x, y) = origin(nc, nr);
        fill(&mut map, x, y, corridor, corridor);
        // Knock out the wall between the two cells.
        let (ax, ay) = origin(c.min(nc), r.min(nr));
        if nc != c {
            fill(&mut map, ax + corridor, ay, wall, corridor);
        } else {
            fill(&mut map, ax, ay + corridor, corridor, wall);
        }
        stack.push((nc, nr));
    }
    map
}

/// Open terrain with scattered rectangular and round obstacles covering
/// roughly `density` of the area.
pub fn terrain(width: usize, height: usize, density: f64, seed: u64) -> GridMap {
    let mut map = open(width, height);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target = (density.clamp(0.0, 0.9) * (width * height) as f64) as usize;
    let max_size = (width.min(height) / 6).max(2);
    let mut blocked = 0;
    while blocked < target {
        let w = rng.gen_range(1..=max_size);
        let h = rng.gen_range(1..=max_size);
        let x0 = rng.gen_range(0..width);
        let y0 = rng.gen_range(0..height);
        let round = rng.gen_bool(0.5);
        for y in y0..(y0 + h).min(height) {
            for x in x0..(x0 + w).min(width) {
                if round {
                    let dx = (x - x0) as f64 - w as f64 / 2.0;
                    let dy = (y - y0) as f64 - h as f64 / 2.0;
                    let (rx, ry) = (w as f64 / 2.0, h as f64 / 2.0);
                    if (dx / rx).powi(2) + (dy / ry).powi(2) > 1.0 {
                        continue;
                    }
                }
                if map.is_passable(x as i64, y as i64) {
                    map.set_passable(x, y, false);
                    blocked += 1;
                }
            }
        }
    }
    map
}

/// Square rooms of side `room` separated by one-cell walls, each wall
/// segment pierced by a door with probability `door_chance`.
pub fn rooms(width: usize, height: usize, room: usize, door_chance: f64, seed: u64) -> GridMap {
    let mut map = open(width, height);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pitch = room + 1;
    for y in 0..height {
        for x in 0..width {
            if x % pitch == room || y % pitch == room {
                map.set_passable(x, y, false);
            }
        }
    }
    for by in 0..height.div_ceil(pitch) {
        for bx in 0..width.div_ceil(pitch) {
            let (x0, y0) = (bx * pitch, by * pitch);
            // Door in the east wall.
            let wx = x0 + room;
            if wx + 1 < width && rng.gen_bool(door_chance) {
                let y = y0 + rng.gen_range(0..room);
                if y < height {
                    map.set_passable(wx, y, true);
                }
            }
            // Door in the south wall.
            let wy = y0 + room;
            if wy + 1 < height && rng.gen_bool(door_chance) {
                let x = x0 + rng.gen_range(0..room);
                if x < width {
                    map.set_passable(x, wy, true);
                }
            }
        }
    }
    map
}

/// Cave-like terrain grown by cellular-automaton smoothing of random noise,
/// reduced to its largest 4-connected open region.
///
/// `fill` is the initial obstacle probability; each of the `steps` smoothing
/// rounds blocks a cell when at least five of its eight neighbors (counting
/// the outside as blocked) are blocked.
pub fn caves(width: usize, height: usize, fill: f64, steps: usize, seed: u64) -> GridMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut blocked: Vec<bool> = (0..width * height).map(|_| rng.gen_bool(fill)).collect();
    let at = |b: &[bool], x: i64, y: i64| {
        x < 0 || y < 0 || x >= width as i64 || y >= height as i64 || b[y as usize * width + x as usize]
    };
    for _ in 0..steps {
        let mut next = blocked.clone();
        for y in 0..height as i64 {
            for x in 0..width as i64 {
                let mut walls = 0;
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        if (dx, dy) != (0, 0) && at(&blocked, x + dx, y + dy) {
                            walls += 1;
                        }
                    }
                }
                next[y as usize * width + x as usize] = walls >= 5;
            }
        }
        blocked = next;
    }

    // Keep only the largest open region.
    let mut label = vec![usize::MAX; width * height];
    let mut sizes = Vec::new();
    for s in 0..width * height {
        if blocked[s] || label[s] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        let mut stack = vec![s];
        label[s] = id;
        let mut size = 0;
        while let Some(c) = stack.pop() {
            size += 1;
            let (x, y) = ((c % width) as i64, (c / width) as i64);
            for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let (nx, ny) = (x + dx, y + dy);
                if !at(&blocked, nx, ny) {
                    let n = ny as usize * width + nx as usize;
                    if label[n] == usize::MAX {
                        label[n] = id;
                        stack.push(n);
                    }
                }
            }
        }
        sizes.push(size);
    }
    let keep = (0..sizes.len()).max_by_key(|&i| (sizes[i], usize::MAX - i));
    let passable = label.iter().map(|&l| Some(l) == keep).collect();
    GridMap::new(width, height, passable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;
    use crate::grid::grid_to_graph;

    #[test]
    fn maze_is_connected_and_acyclic_at_cell_level() {
        let m = maze(33, 33, 3, 1, 5);
        let g = grid_to_graph::<f64>(&m.clone().with_neighborhood(crate::grid::Neighborhood::Four));
        assert!(g.graph.components().iter().all(|&c| c == 0));
        // 8x8 cells of 3x3 plus 63 tree passages of 3x1.
        assert_eq!(m.passable_count(), 64 * 9 + 63 * 3);
        assert!(g.graph.contains(NodeId(0)));
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(maze(40, 40, 2, 1, 9), maze(40, 40, 2, 1, 9));
        assert_eq!(terrain(40, 30, 0.2, 9), terrain(40, 30, 0.2, 9));
        assert_eq!(rooms(40, 30, 6, 0.7, 9), rooms(40, 30, 6, 0.7, 9));
        assert_ne!(maze(40, 40, 2, 1, 9), maze(40, 40, 2, 1, 10));
    }

    #[test]
    fn terrain_density_is_close() {
        let m = terrain(100, 100, 0.2, 1);
        let blocked = 10_000 - m.passable_count();
        assert!((2000..2600).contains(&blocked), "{blocked}");
    }
}
