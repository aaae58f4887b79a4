//! Grid routing: walkable graph construction, deterministic breadth-first
//! shortest paths, bounded random route perturbation, and dwell arithmetic.

use std::collections::VecDeque;

use crate::dynamics::speed_ratio_sat;
use crate::error::{Result, SimError};
use crate::model::{CellRef, PersonType, VenueMap, CELL_COUNT, CELL_SIZE_M, GRID_H, GRID_W};
use crate::rng::SimRng;

pub type NodeId = u16;

/// Walkable-cell adjacency: 4-neighborhood within a floor plus stair links.
/// Neighbor order is fixed (+x, -x, +y, -y, stairs) so that equal-length BFS
/// ties resolve identically on every platform.
#[derive(Debug, Clone)]
pub struct GridGraph {
    neighbors: Vec<Vec<NodeId>>,
    walkable: Vec<bool>,
}

/// A permission-filtered view of the graph.
pub type Mask = Vec<bool>;

impl GridGraph {
    pub fn build(map: &VenueMap) -> Self {
        let mut walkable = vec![false; CELL_COUNT];
        for c in map.walkable_cells() {
            walkable[c.index()] = true;
        }
        let mut neighbors: Vec<Vec<NodeId>> = vec![Vec::new(); CELL_COUNT];
        for idx in 0..CELL_COUNT {
            if !walkable[idx] {
                continue;
            }
            let c = CellRef::from_index(idx);
            let push = |fx: i32, fy: i32, list: &mut Vec<NodeId>| {
                if (0..GRID_W as i32).contains(&fx) && (0..GRID_H as i32).contains(&fy) {
                    let n = CellRef::new(c.floor, fx as u8, fy as u8);
                    if walkable[n.index()] {
                        list.push(n.index() as NodeId);
                    }
                }
            };
            let list = &mut neighbors[idx];
            push(c.x as i32 + 1, c.y as i32, list);
            push(c.x as i32 - 1, c.y as i32, list);
            push(c.x as i32, c.y as i32 + 1, list);
            push(c.x as i32, c.y as i32 - 1, list);
        }
        let mut stair_links: Vec<(usize, usize)> = map
            .stairs
            .iter()
            .map(|(a, b)| (a.index(), b.index()))
            .collect();
        stair_links.sort_unstable();
        for (a, b) in stair_links {
            if walkable[a] && walkable[b] {
                neighbors[a].push(b as NodeId);
                neighbors[b].push(a as NodeId);
            }
        }
        GridGraph {
            neighbors,
            walkable,
        }
    }

    #[inline]
    pub fn neighbors(&self, n: NodeId) -> &[NodeId] {
        &self.neighbors[n as usize]
    }

    #[inline]
    pub fn is_walkable(&self, n: NodeId) -> bool {
        self.walkable[n as usize]
    }

    pub fn adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.neighbors[a as usize].contains(&b)
    }

    /// Full-walkability mask.
    pub fn full_mask(&self) -> Mask {
        self.walkable.clone()
    }

    /// Mask restricted to zones `ptype` may enter.
    pub fn mask_for(&self, map: &VenueMap, ptype: PersonType) -> Mask {
        (0..CELL_COUNT)
            .map(|i| self.walkable[i] && map.permitted_cell(ptype, CellRef::from_index(i)))
            .collect()
    }

    /// Minimum-hop path from `from` to `to` inside `mask`, endpoints included.
    /// Among equal-length paths the fixed neighbor order decides.
    pub fn shortest_route(&self, from: NodeId, to: NodeId, mask: &Mask) -> Result<Route> {
        let path = self.bfs_path(from, to, mask, None)?;
        Ok(Route { cells: path })
    }

    /// Like [`GridGraph::shortest_route`] but treating cells listed in `avoid`
    /// as blocked (used for congestion re-planning). `from` and `to` are never
    /// considered blocked.
    pub fn shortest_route_avoiding(
        &self,
        from: NodeId,
        to: NodeId,
        mask: &Mask,
        avoid: &dyn Fn(NodeId) -> bool,
    ) -> Result<Route> {
        let path = self.bfs_path(from, to, mask, Some(avoid))?;
        Ok(Route { cells: path })
    }

    fn bfs_path(
        &self,
        from: NodeId,
        to: NodeId,
        mask: &Mask,
        avoid: Option<&dyn Fn(NodeId) -> bool>,
    ) -> Result<Vec<NodeId>> {
        let no_route = || SimError::NoRoute {
            from: CellRef::from_index(from as usize).to_string(),
            to: CellRef::from_index(to as usize).to_string(),
            who: "route".into(),
        };
        if !mask[from as usize] || !mask[to as usize] {
            return Err(no_route());
        }
        if from == to {
            return Ok(vec![from]);
        }
        let mut parent: Vec<NodeId> = vec![NodeId::MAX; CELL_COUNT];
        let mut queue = VecDeque::new();
        parent[from as usize] = from;
        queue.push_back(from);
        'outer: while let Some(cur) = queue.pop_front() {
            for &n in &self.neighbors[cur as usize] {
                if parent[n as usize] != NodeId::MAX || !mask[n as usize] {
                    continue;
                }
                if n != to {
                    if let Some(avoid) = avoid {
                        if avoid(n) {
                            continue;
                        }
                    }
                }
                parent[n as usize] = cur;
                if n == to {
                    break 'outer;
                }
                queue.push_back(n);
            }
        }
        if parent[to as usize] == NodeId::MAX {
            return Err(no_route());
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = parent[cur as usize];
            path.push(cur);
        }
        path.reverse();
        Ok(path)
    }

    /// Hop distances from `from` to every node in `mask` (`u32::MAX` where
    /// unreachable).
    pub fn distances(&self, from: NodeId, mask: &Mask) -> Vec<u32> {
        let mut dist = vec![u32::MAX; CELL_COUNT];
        if !mask[from as usize] {
            return dist;
        }
        dist[from as usize] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(from);
        while let Some(cur) = queue.pop_front() {
            let d = dist[cur as usize] + 1;
            for &n in &self.neighbors[cur as usize] {
                if mask[n as usize] && dist[n as usize] == u32::MAX {
                    dist[n as usize] = d;
                    queue.push_back(n);
                }
            }
        }
        dist
    }

    /// Fastest possible travel time in seconds from `from` to every node,
    /// assuming zero congestion (Dijkstra over per-cell minimum dwells).
    /// Used as a physical feasibility lower bound.
    pub fn min_travel_times(&self, map: &VenueMap, from: NodeId) -> Vec<i64> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;
        let mut best = vec![i64::MAX; CELL_COUNT];
        if !self.walkable[from as usize] {
            return best;
        }
        let dwell: Vec<i64> = (0..CELL_COUNT)
            .map(|i| {
                if self.walkable[i] {
                    map.min_dwell(CellRef::from_index(i))
                } else {
                    i64::MAX / 4
                }
            })
            .collect();
        best[from as usize] = 0;
        let mut heap = BinaryHeap::new();
        heap.push(Reverse((0i64, from)));
        while let Some(Reverse((d, cur))) = heap.pop() {
            if d > best[cur as usize] {
                continue;
            }
            let step = d + dwell[cur as usize];
            for &n in &self.neighbors[cur as usize] {
                if step < best[n as usize] {
                    best[n as usize] = step;
                    heap.push(Reverse((step, n)));
                }
            }
        }
        best
    }
}

/// Shortest route that prefers transit zones (corridors, stairs, entrances):
/// crossing a functional room costs three corridor cells. Scripted walks and
/// fusion bridges use this so forced traffic sticks to hallways instead of
/// cutting through occupied rooms.
pub fn hallway_route(
    graph: &GridGraph,
    map: &VenueMap,
    from: NodeId,
    to: NodeId,
    mask: &Mask,
) -> Result<Route> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    if !mask[from as usize] || !mask[to as usize] {
        return Err(SimError::NoRoute {
            from: CellRef::from_index(from as usize).to_string(),
            to: CellRef::from_index(to as usize).to_string(),
            who: "hallway route".into(),
        });
    }
    let cost_of = |n: NodeId| -> u32 {
        let name = map
            .zone_of(CellRef::from_index(n as usize))
            .map(|z| map.zones[z as usize].name.as_str())
            .unwrap_or("");
        match name {
            "corridor" | "stairs" | "entrance" | "vip_channel" => 1,
            _ => 3,
        }
    };
    let mut best = vec![u32::MAX; CELL_COUNT];
    let mut parent = vec![NodeId::MAX; CELL_COUNT];
    best[from as usize] = 0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u32, from)));
    while let Some(Reverse((d, cur))) = heap.pop() {
        if cur == to {
            break;
        }
        if d > best[cur as usize] {
            continue;
        }
        for &n in graph.neighbors(cur) {
            if !mask[n as usize] {
                continue;
            }
            let nd = d + cost_of(n);
            if nd < best[n as usize] {
                best[n as usize] = nd;
                parent[n as usize] = cur;
                heap.push(Reverse((nd, n)));
            }
        }
    }
    if from != to && parent[to as usize] == NodeId::MAX {
        return Err(SimError::NoRoute {
            from: CellRef::from_index(from as usize).to_string(),
            to: CellRef::from_index(to as usize).to_string(),
            who: "hallway route".into(),
        });
    }
    let mut cells = vec![to];
    let mut cur = to;
    while cur != from {
        cur = parent[cur as usize];
        cells.push(cur);
    }
    cells.reverse();
    Ok(Route { cells })
}

/// Permission mask for `ptype` widened by the zones of the given cells, for
/// walks that deliberately visit restricted places: the actor may cross its
/// own permitted zones plus exactly the zones it was sent into.
pub fn mask_with_zones(
    graph: &GridGraph,
    map: &VenueMap,
    ptype: PersonType,
    through: &[NodeId],
) -> Mask {
    let mut mask = graph.mask_for(map, ptype);
    for &n in through {
        if let Some(zone) = map.zone_of(CellRef::from_index(n as usize)) {
            for c in &map.zones[zone as usize].cells {
                mask[c.index()] = true;
            }
        }
    }
    mask
}

/// An ordered walk on the graph from origin to destination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub cells: Vec<NodeId>,
}

impl Route {
    pub fn hops(&self) -> usize {
        self.cells.len().saturating_sub(1)
    }

    pub fn origin(&self) -> NodeId {
        self.cells[0]
    }

    pub fn destination(&self) -> NodeId {
        *self.cells.last().unwrap()
    }
}

/// Insert sidestep detours (one-cell excursions that return) with probability
/// proportional to `strength`. The result stays a valid walk on `mask`, and
/// its hop count never exceeds `original * (1 + 2 * strength)`.
pub fn perturb_route(
    graph: &GridGraph,
    route: &Route,
    mask: &Mask,
    rng: &mut SimRng,
    strength: f64,
) -> Route {
    let hops = route.hops();
    if strength <= 0.0 || hops == 0 {
        return route.clone();
    }
    let budget = (strength * hops as f64).floor() as usize;
    if budget == 0 {
        return route.clone();
    }
    let mut out = Vec::with_capacity(route.cells.len() + 2 * budget);
    let mut used = 0;
    for i in 0..route.cells.len() {
        let cur = route.cells[i];
        out.push(cur);
        if i + 1 >= route.cells.len() || used >= budget {
            continue;
        }
        if !rng.chance(strength) {
            continue;
        }
        let next = route.cells[i + 1];
        let prev = if i > 0 { Some(route.cells[i - 1]) } else { None };
        // Candidate detours keep the canonical neighbor order for determinism.
        let detour = graph
            .neighbors(cur)
            .iter()
            .copied()
            .filter(|&d| mask[d as usize] && d != next && Some(d) != prev)
            .collect::<Vec<_>>();
        if detour.is_empty() {
            continue;
        }
        let d = detour[rng.next_below(detour.len() as u64) as usize];
        out.push(d);
        out.push(cur);
        used += 1;
    }
    Route { cells: out }
}

/// Seconds spent in a cell before attempting the next hop, given the cell's
/// speed limit and its saturation at entry.
pub fn dwell_seconds(max_speed: f64, sc: f64) -> i64 {
    let sr = speed_ratio_sat(sc);
    let v = max_speed * sr;
    if v <= 1e-9 {
        // Fully saturated: effectively no forward motion this step.
        return i64::MAX / 4;
    }
    (CELL_SIZE_M / v).ceil() as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config;

    fn default_map() -> VenueMap {
        config::build_map(&config::default_map_file()).unwrap()
    }

    #[test]
    fn dwell_examples() {
        assert_eq!(dwell_seconds(4.0, 0.0), 2);
        assert_eq!(dwell_seconds(4.0, 0.5), 12);
        assert!(dwell_seconds(4.0, 1.0) > 1_000_000);
    }

    #[test]
    fn zero_and_one_hop_routes() {
        let map = default_map();
        let g = GridGraph::build(&map);
        let mask = g.full_mask();
        let a = CellRef::new(1, 15, 7).index() as NodeId;
        let b = CellRef::new(1, 16, 7).index() as NodeId;
        assert_eq!(g.shortest_route(a, a, &mask).unwrap().hops(), 0);
        assert_eq!(g.shortest_route(a, b, &mask).unwrap().hops(), 1);
    }

    #[test]
    fn open_floor_distance_is_manhattan() {
        let map = default_map();
        let g = GridGraph::build(&map);
        let mask = g.full_mask();
        // Both endpoints on the open corridor spine.
        let a = CellRef::new(1, 10, 7).index() as NodeId;
        let b = CellRef::new(1, 13, 8).index() as NodeId;
        let r = g.shortest_route(a, b, &mask).unwrap();
        assert_eq!(r.hops(), 4); // |13-10| + |8-7|
    }

    #[test]
    fn perturbation_identity_and_cap() {
        let map = default_map();
        let g = GridGraph::build(&map);
        let mask = g.full_mask();
        let from = CellRef::new(1, 2, 7).index() as NodeId;
        let to = CellRef::new(1, 26, 8).index() as NodeId;
        let base = g.shortest_route(from, to, &mask).unwrap();

        let mut rng = SimRng::new(5);
        assert_eq!(perturb_route(&g, &base, &mask, &mut rng, 0.0), base);

        let mut r1 = SimRng::new(9);
        let mut r2 = SimRng::new(9);
        let p1 = perturb_route(&g, &base, &mask, &mut r1, 0.3);
        let p2 = perturb_route(&g, &base, &mask, &mut r2, 0.3);
        assert_eq!(p1, p2);

        for seed in 0..50 {
            let mut rng = SimRng::new(seed);
            let p = perturb_route(&g, &base, &mask, &mut rng, 0.3);
            assert!(p.hops() as f64 <= base.hops() as f64 * 1.6 + 1e-9);
            // Still a valid walk.
            for w in p.cells.windows(2) {
                assert!(g.adjacent(w[0], w[1]));
            }
            assert_eq!(p.origin(), from);
            assert_eq!(p.destination(), to);
        }
    }
}
