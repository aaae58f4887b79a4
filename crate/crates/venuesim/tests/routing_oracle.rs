//! Shortest-route regression against an independent brute-force oracle on
//! small synthetic maps with random walls.

use venuesim::model::{CellRef, GridCell, VenueMap, Zone};
use venuesim::rng::SimRng;
use venuesim::routing::GridGraph;

/// Build a venue whose walkable area is a w x h patch of floor 1 minus walls.
fn patch_map(w: u8, h: u8, walls: &[(u8, u8)]) -> VenueMap {
    let mut cells: Vec<Option<GridCell>> = vec![None; venuesim::model::CELL_COUNT];
    let mut zone_cells = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if walls.contains(&(x, y)) {
                continue;
            }
            let c = CellRef::new(1, x, y);
            cells[c.index()] = Some(GridCell {
                zone: 0,
                capacity: 10,
                max_speed: 2.0,
            });
            zone_cells.push(c);
        }
    }
    let zone = Zone {
        name: "patch".into(),
        restricted_to: vec![],
        cells: zone_cells.clone(),
        capacity_per_cell: 10,
        max_speed: 2.0,
    };
    VenueMap::new(cells, vec![zone], vec![], zone_cells.clone(), zone_cells)
}

/// Plain level-order flood fill, structured differently from the router.
fn oracle_distances(w: u8, h: u8, walls: &[(u8, u8)], from: (u8, u8)) -> Vec<Vec<Option<u32>>> {
    let mut dist: Vec<Vec<Option<u32>>> = vec![vec![None; w as usize]; h as usize];
    if walls.contains(&from) {
        return dist;
    }
    let mut frontier = vec![from];
    dist[from.1 as usize][from.0 as usize] = Some(0);
    let mut level = 0;
    while !frontier.is_empty() {
        level += 1;
        let mut next = Vec::new();
        for (x, y) in frontier {
            for (dx, dy) in [(1i16, 0i16), (-1, 0), (0, 1), (0, -1)] {
                let (nx, ny) = (x as i16 + dx, y as i16 + dy);
                if nx < 0 || ny < 0 || nx >= w as i16 || ny >= h as i16 {
                    continue;
                }
                let (nx, ny) = (nx as u8, ny as u8);
                if walls.contains(&(nx, ny)) || dist[ny as usize][nx as usize].is_some() {
                    continue;
                }
                dist[ny as usize][nx as usize] = Some(level);
                next.push((nx, ny));
            }
        }
        frontier = next;
    }
    dist
}

fn check_map(w: u8, h: u8, walls: &[(u8, u8)]) {
    let map = patch_map(w, h, walls);
    let graph = GridGraph::build(&map);
    let mask = graph.full_mask();
    let open: Vec<(u8, u8)> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .filter(|p| !walls.contains(p))
        .collect();
    for &(fx, fy) in &open {
        let oracle = oracle_distances(w, h, walls, (fx, fy));
        let from = CellRef::new(1, fx, fy).index() as u16;
        for &(tx, ty) in &open {
            let to = CellRef::new(1, tx, ty).index() as u16;
            let expected = oracle[ty as usize][tx as usize];
            let got = graph.shortest_route(from, to, &mask).ok().map(|r| r.hops() as u32);
            assert_eq!(
                got, expected,
                "{w}x{h} walls {walls:?}: {fx},{fy} -> {tx},{ty}"
            );
        }
    }
}

#[test]
fn trivial_routes() {
    let map = patch_map(5, 5, &[]);
    let graph = GridGraph::build(&map);
    let mask = graph.full_mask();
    let a = CellRef::new(1, 0, 0).index() as u16;
    let b = CellRef::new(1, 1, 0).index() as u16;
    let c = CellRef::new(1, 3, 2).index() as u16;
    assert_eq!(graph.shortest_route(a, a, &mask).unwrap().hops(), 0);
    assert_eq!(graph.shortest_route(a, b, &mask).unwrap().hops(), 1);
    // Manhattan distance on an open floor.
    assert_eq!(graph.shortest_route(a, c, &mask).unwrap().hops(), 5);
}

#[test]
fn routes_never_cross_walls() {
    // A wall splitting a 5x5 patch except one doorway.
    let walls: Vec<(u8, u8)> = (0..5).filter(|y| *y != 2).map(|y| (2, y)).collect();
    let map = patch_map(5, 5, &walls);
    let graph = GridGraph::build(&map);
    let mask = graph.full_mask();
    let from = CellRef::new(1, 0, 0).index() as u16;
    let to = CellRef::new(1, 4, 0).index() as u16;
    let route = graph.shortest_route(from, to, &mask).unwrap();
    for n in &route.cells {
        let c = CellRef::from_index(*n as usize);
        assert!(!walls.contains(&(c.x, c.y)), "route crossed a wall at {c}");
    }
    // Forced through the doorway at (2,2): 4 right + 4 vertical hops.
    assert_eq!(route.hops(), 8);
    check_map(5, 5, &walls);
}

#[test]
fn random_walls_match_oracle() {
    // A slice of the full acceptance sweep, enough for fast regression.
    let mut rng = SimRng::new(2024);
    for w in 2..=8u8 {
        for h in 2..=8u8 {
            for _ in 0..6 {
                let n_walls = rng.next_below(11) as usize;
                let mut walls = Vec::new();
                for _ in 0..n_walls {
                    walls.push((
                        rng.next_below(w as u64) as u8,
                        rng.next_below(h as u64) as u8,
                    ));
                }
                walls.sort_unstable();
                walls.dedup();
                check_map(w, h, &walls);
            }
        }
    }
}
