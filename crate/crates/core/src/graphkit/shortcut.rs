use super::{check_disjoint_paths, ClosedWalk, Path};
use crate::error::{Error, Result};
use crate::model::Tour;

/// Shortcuts a closed walk into a tour that keeps every given path intact.
///
/// The walk is first rotated to start at a vertex that is not an inner vertex
/// of any path. Vertices outside the paths are kept at their first visit. A
/// path's vertices are skipped everywhere except inside the walk's first
/// complete traversal of that path, where the whole path is emitted. Under a
/// metric the tour costs at most as much as the walk.
pub fn shortcut_preserving_paths(walk: &ClosedWalk, paths: &[Path], n: usize) -> Result<Tour> {
    let order = walk.order();
    if let Some(&v) = order.iter().find(|&&v| v >= n) {
        return Err(Error::input(format!("walk vertex {v} outside 0..{n}")));
    }
    check_disjoint_paths(n, paths)?;
    let paths: Vec<&Path> = paths.iter().filter(|p| p.len() >= 2).collect();

    let mut owner = vec![None; n];
    let mut inner = vec![false; n];
    for (j, p) in paths.iter().enumerate() {
        for &v in p.order() {
            owner[v] = Some(j);
        }
        for &v in p.inner() {
            inner[v] = true;
        }
    }

    let cyc = &order[..order.len() - 1];
    let start = cyc
        .iter()
        .position(|&v| !inner[v])
        .ok_or_else(|| Error::input("every walk vertex is an inner path vertex"))?;
    let mut lin: Vec<usize> = Vec::with_capacity(order.len());
    lin.extend_from_slice(&cyc[start..]);
    lin.extend_from_slice(&cyc[..start]);
    lin.push(cyc[start]);

    // Position ranges of the first full traversal of each path.
    let mut in_window = vec![false; lin.len()];
    for (j, p) in paths.iter().enumerate() {
        let at = p.find_in(&lin).ok_or_else(|| {
            Error::input(format!("path {j} is not a contiguous part of the walk"))
        })?;
        in_window[at..at + p.len()]
            .iter_mut()
            .for_each(|w| *w = true);
    }

    let mut visited = vec![false; n];
    let mut tour = Vec::with_capacity(n);
    for (t, &v) in lin.iter().enumerate() {
        if in_window[t] {
            // Path vertices are emitted only here and paths are disjoint.
            debug_assert!(
                !visited[v],
                "path vertex {v} emitted before its first traversal"
            );
            if !visited[v] {
                visited[v] = true;
                tour.push(v);
            }
        } else if owner[v].is_none() && !visited[v] {
            visited[v] = true;
            tour.push(v);
        }
    }
    if tour.len() != n {
        return Err(Error::input(format!(
            "walk visits {} of the {n} vertices",
            tour.len()
        )));
    }
    Tour::new(tour)
}
