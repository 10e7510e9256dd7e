//! Planar witnesses for centralized structures.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::coalition::{AgentId, CoalitionStructure};
use crate::error::{Error, Result};
use crate::rational::{coord, half, Coord};
use crate::structure::{span, PathWitness};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circle {
    pub center: AgentId,
    /// Squared radius; radii in hand-drawn witnesses are often irrational.
    pub radius_sq: Coord,
}

/// Agent positions plus one circle per coalition, aligned with the
/// coalition order of the structure it certifies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarWitness {
    /// `positions[j - 1]` is the point of agent `j`.
    pub positions: Vec<(Coord, Coord)>,
    pub circles: Vec<Circle>,
}

impl PlanarWitness {
    pub fn position(&self, agent: AgentId) -> &(Coord, Coord) {
        &self.positions[agent - 1]
    }

    pub fn dist_sq(&self, a: AgentId, b: AgentId) -> Coord {
        let (ax, ay) = self.position(a);
        let (bx, by) = self.position(b);
        let dx = ax - bx;
        let dy = ay - by;
        &dx * &dx + &dy * &dy
    }

    pub fn inside(&self, circle: &Circle, agent: AgentId) -> bool {
        self.dist_sq(circle.center, agent) <= circle.radius_sq
    }
}

/// Checks the witness and reports the first mismatch.
pub fn check_embedding(c: &CoalitionStructure, w: &PlanarWitness) -> Result<()> {
    let n = c.n_agents();
    if w.positions.len() != n {
        return Err(Error::InvalidWitness(format!("{} positions for {n} agents", w.positions.len())));
    }
    if w.circles.len() != c.len() {
        return Err(Error::InvalidWitness(format!("{} circles for {} coalitions", w.circles.len(), c.len())));
    }
    for (k, (coal, circle)) in c.coalitions().iter().zip(&w.circles).enumerate() {
        if !coal.contains(circle.center) {
            return Err(Error::InvalidWitness(format!(
                "circle {} is centered at agent {} outside coalition {coal}",
                k + 1,
                circle.center
            )));
        }
        if !circle.radius_sq.is_positive() {
            return Err(Error::InvalidWitness(format!("circle {} has nonpositive radius", k + 1)));
        }
        for j in 1..=n {
            if w.inside(circle, j) != coal.contains(j) {
                return Err(Error::InvalidWitness(format!(
                    "agent {j} is {} the circle of coalition {coal}",
                    if coal.contains(j) { "outside" } else { "inside" }
                )));
            }
        }
    }
    Ok(())
}

pub fn verify_embedding(c: &CoalitionStructure, w: &PlanarWitness) -> bool {
    check_embedding(c, w).is_ok()
}

/// Star-list embedding of a contiguous structure.
///
/// Agents go on the x-axis in path order; after agent `j` a run of stars as
/// long as the distance back to the leftmost agent sharing a coalition ending
/// at `j` keeps every later agent out of the circles that end at `j`. Each
/// circle is centered at the last member of its coalition on the path.
pub fn contiguous_to_embedding(c: &CoalitionStructure, path: &PathWitness) -> Result<PlanarWitness> {
    path.check(c)?;
    let n = c.n_agents();
    let pos = path.positions();
    // Leftmost start among multi-agent coalitions ending at each path slot.
    let mut leftmost: Vec<Option<usize>> = vec![None; n];
    let spans: Vec<(usize, usize)> = c.coalitions().iter().map(|k| span(k, &pos)).collect();
    for &(lo, hi) in &spans {
        if lo != hi {
            leftmost[hi] = Some(leftmost[hi].map_or(lo, |v: usize| v.min(lo)));
        }
    }
    let mut x: Vec<BigInt> = Vec::with_capacity(n);
    let mut len = BigInt::zero();
    for slot in 0..n {
        x.push(len.clone());
        len += BigInt::one();
        if let Some(lo) = leftmost[slot] {
            len += &x[slot] - &x[lo];
        }
    }
    let mut positions = vec![(coord(0), coord(0)); n];
    for (slot, &agent) in path.order.iter().enumerate() {
        positions[agent - 1] = (Coord::from_integer(x[slot].clone()), coord(0));
    }
    let circles = spans
        .iter()
        .map(|&(lo, hi)| {
            let center = path.order[hi];
            let radius_sq = if lo == hi {
                half() * half()
            } else {
                let r = Coord::from_integer(&x[hi] - &x[lo]);
                &r * &r
            };
            Circle { center, radius_sq }
        })
        .collect();
    let w = PlanarWitness { positions, circles };
    debug_assert!(verify_embedding(c, &w));
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::coord_frac;

    fn s(n: usize, lists: &[&[usize]]) -> CoalitionStructure {
        CoalitionStructure::from_lists(n, &lists.iter().map(|l| l.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn pt(x: i64, y: i64) -> (Coord, Coord) {
        (coord(x), coord(y))
    }

    #[test]
    fn star_list_on_overlapping_pairs() {
        let c = s(3, &[&[1, 2], &[2, 3]]);
        let w = contiguous_to_embedding(&c, &PathWitness::identity(3)).unwrap();
        assert!(verify_embedding(&c, &w));
        // L = (1, 2, *, 3, *, *): gaps 1 and 2.
        assert_eq!(w.positions, vec![pt(0, 0), pt(1, 0), pt(3, 0)]);
    }

    #[test]
    fn empty_and_single_interval() {
        let e = CoalitionStructure::empty(3);
        let w = contiguous_to_embedding(&e, &PathWitness::identity(3)).unwrap();
        assert_eq!(w.positions, vec![pt(0, 0), pt(1, 0), pt(2, 0)]);
        assert!(w.circles.is_empty());

        let one = s(3, &[&[1, 2, 3]]);
        let w = contiguous_to_embedding(&one, &PathWitness::identity(3)).unwrap();
        assert!(verify_embedding(&one, &w));
        assert_eq!(w.circles[0].center, 3);
    }

    #[test]
    fn unit_square_witness() {
        let c = s(4, &[&[1, 2, 3], &[2, 3, 4], &[3, 4, 1], &[4, 1, 2]]);
        let positions = vec![pt(0, 0), pt(1, 0), pt(1, 1), pt(0, 1)];
        let circles = [2, 3, 4, 1].iter().map(|&center| Circle { center, radius_sq: coord(1) }).collect();
        let w = PlanarWitness { positions, circles };
        assert!(verify_embedding(&c, &w));
    }

    #[test]
    fn boundary_is_exact() {
        let c = s(2, &[&[1, 2]]);
        let mut w = PlanarWitness {
            positions: vec![pt(0, 0), (coord_frac(3, 5), coord_frac(4, 5))],
            circles: vec![Circle { center: 1, radius_sq: coord(1) }],
        };
        assert!(verify_embedding(&c, &w));
        w.circles[0].radius_sq = coord(1) - coord_frac(1, 1_000_000_000);
        assert!(!verify_embedding(&c, &w));
    }

    #[test]
    fn rejects_malformed_witnesses() {
        let c = s(2, &[&[1]]);
        let w = PlanarWitness { positions: vec![pt(0, 0), pt(5, 0)], circles: vec![Circle { center: 2, radius_sq: coord(1) }] };
        assert!(!verify_embedding(&c, &w));
        let w = PlanarWitness { positions: vec![pt(0, 0), pt(5, 0)], circles: vec![Circle { center: 1, radius_sq: coord(0) }] };
        assert!(!verify_embedding(&c, &w));
        let w = PlanarWitness { positions: vec![pt(0, 0), pt(5, 0)], circles: vec![Circle { center: 1, radius_sq: coord(1) }] };
        assert!(verify_embedding(&c, &w));
    }
}
