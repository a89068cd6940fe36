//! l-isogeny graphs on j-invariants over F_{p^2}: vertices are
//! j-invariants, directed arcs the roots of Phi_l(j, Y) counted with
//! multiplicity. The supersingular restriction takes the roots of the
//! supersingular polynomial as vertex set.

use super::modpoly::{bigint_in, modular_polynomial};
use crate::certify::ss_poly::supersingular_polynomial;
use crate::exact::field::Field;
use crate::exact::poly;
use crate::exact::residue::ResidueField;
use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphRestriction {
    All,
    Supersingular,
}

#[derive(Debug, Clone)]
pub struct IsogenyGraph {
    pub p: u64,
    pub ell: u64,
    pub field: ResidueField,
    pub vertices: Vec<Vec<u64>>,
    index: HashMap<Vec<u64>, usize>,
    /// adj[v] = list of (target vertex, arc multiplicity); arcs to
    /// j-invariants outside the vertex set are dropped
    pub adj: Vec<Vec<(usize, usize)>>,
    /// j = 0 or j = 1728
    pub elliptic: Vec<bool>,
    pub supersingular: Vec<bool>,
}

impl IsogenyGraph {
    pub fn vertex_index(&self, j: &[u64]) -> Option<usize> {
        self.index.get(j).copied()
    }

    /// Directed degree of v into the member set.
    pub fn degree_into(&self, v: usize, members: &[bool]) -> u64 {
        self.adj[v]
            .iter()
            .filter(|(w, _)| members[*w])
            .map(|(_, m)| *m as u64)
            .sum()
    }

    /// Is the subset a polar condition: deg(v, P) = 1 implies v in P.
    pub fn is_polar(&self, members: &[bool]) -> bool {
        assert_eq!(members.len(), self.vertices.len());
        (0..self.vertices.len()).all(|v| members[v] || self.degree_into(v, members) != 1)
    }

    /// Total directed out-degree (with multiplicity) of v inside the graph.
    pub fn out_degree(&self, v: usize) -> u64 {
        self.adj[v].iter().map(|(_, m)| *m as u64).sum()
    }

    /// Connected components of the undirected view.
    pub fn components(&self) -> Vec<usize> {
        let n = self.vertices.len();
        let mut comp = vec![usize::MAX; n];
        let mut c = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = c;
            while let Some(v) = stack.pop() {
                for &(w, _) in &self.adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = c;
                        stack.push(w);
                    }
                }
            }
            c += 1;
        }
        comp
    }

    pub fn edge_list(&self) -> String {
        let mut out = String::new();
        for v in 0..self.vertices.len() {
            for &(w, m) in &self.adj[v] {
                if w < v {
                    continue; // one line per unordered pair (and loops)
                }
                out.push_str(&format!(
                    "{} {} {}\n",
                    elem_str(&self.vertices[v]),
                    elem_str(&self.vertices[w]),
                    m
                ));
            }
        }
        out
    }
}

fn elem_str(e: &[u64]) -> String {
    if e.len() >= 2 && e[1] != 0 {
        format!("{}+{}*t", e[0], e[1])
    } else {
        format!("{}", e[0])
    }
}

/// Build the l-isogeny graph over F_{p^2}.
pub fn build_graph(p: u64, ell: u64, restrict: GraphRestriction) -> Result<IsogenyGraph, String> {
    if p == ell {
        return Err("p must differ from l".into());
    }
    let phi = modular_polynomial(ell)?;
    let fq = ResidueField::quadratic_extension(p);
    let q = fq.size();
    let vertices: Vec<Vec<u64>> = match restrict {
        GraphRestriction::Supersingular => {
            let ss = supersingular_polynomial(p);
            let ss_q: Vec<Vec<u64>> = ss.iter().map(|&c| fq.from_base(c)).collect();
            poly::roots_with_multiplicity(&fq, &ss_q, &q, |e| e.clone())
                .into_iter()
                .map(|(r, _)| r)
                .collect()
        }
        GraphRestriction::All => {
            assert!(p <= 1000, "full-graph enumeration capped at p <= 1000");
            let mut out = Vec::with_capacity((p * p) as usize);
            for a in 0..p {
                for b in 0..p {
                    out.push(vec![a, b]);
                }
            }
            out
        }
    };
    let index: HashMap<Vec<u64>, usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), i))
        .collect();
    let mut adj = Vec::with_capacity(vertices.len());
    for j in &vertices {
        let fiber = phi.evaluate_first(&fq, j);
        let roots = poly::roots_with_multiplicity(&fq, &fiber, &q, |e| e.clone());
        let mut row = Vec::new();
        for (y, m) in roots {
            if let Some(&w) = index.get(&y) {
                row.push((w, m));
            }
        }
        adj.push(row);
    }
    let ss = supersingular_polynomial(p);
    let ss_q: Vec<Vec<u64>> = ss.iter().map(|&c| fq.from_base(c)).collect();
    let elliptic: Vec<bool> = vertices
        .iter()
        .map(|j| fq.is_zero(j) || *j == fq.from_base(1728 % p))
        .collect();
    let supersingular: Vec<bool> = vertices
        .iter()
        .map(|j| fq.is_zero(&poly::eval(&fq, &ss_q, j)))
        .collect();
    Ok(IsogenyGraph {
        p,
        ell,
        field: fq,
        vertices,
        index,
        adj,
        elliptic,
        supersingular,
    })
}

/// Result of the local-structure audit: r-neighborhoods of supersingular
/// vertices in the admissible regime must contain at most one simple
/// cycle and at most one elliptic point.
#[derive(Debug, Clone, Default)]
pub struct LocalStructureReport {
    pub audited: usize,
    pub skipped_out_of_regime: usize,
    pub violations: Vec<String>,
}

/// Verify the local structure of the supersingular component at radius r:
/// for every supersingular vertex with p > max(4 l^{4r} / m_level, l^{2r}),
/// the closed r-neighborhood has at most one (conservatively counted)
/// independent cycle and at most one elliptic point, and interior
/// non-elliptic vertices have full degree l + 1.
pub fn local_structure_audit(p: u64, ell: u64, r: u32, m_level: u64) -> Result<LocalStructureReport, String> {
    let g = build_graph(p, ell, GraphRestriction::Supersingular)?;
    let mut report = LocalStructureReport::default();
    let pb = p as u128;
    let admissible =
        pb * m_level as u128 > 4 * (ell as u128).pow(4 * r) && pb > (ell as u128).pow(2 * r);
    for v in 0..g.vertices.len() {
        if !admissible {
            report.skipped_out_of_regime += 1;
            continue;
        }
        report.audited += 1;
        // BFS ball of radius r in the undirected view
        let mut dist: HashMap<usize, u32> = HashMap::new();
        dist.insert(v, 0);
        let mut frontier = vec![v];
        for d in 1..=r {
            let mut next = Vec::new();
            for &u in &frontier {
                for &(w, _) in &g.adj[u] {
                    dist.entry(w).or_insert_with(|| {
                        next.push(w);
                        d
                    });
                }
            }
            frontier = next;
        }
        let ball: Vec<usize> = dist.keys().copied().collect();
        // conservative undirected edge count inside the ball
        let mut edges = 0u64;
        let mut elliptic_count = 0u64;
        for &u in &ball {
            if g.elliptic[u] {
                elliptic_count += 1;
            }
            for &(w, m) in &g.adj[u] {
                if !dist.contains_key(&w) {
                    continue;
                }
                if w == u {
                    // loops: a self-dual loop is one undirected edge from
                    // one arc; count conservatively low
                    edges += (m as u64).div_ceil(2);
                } else if w > u {
                    let back = g.adj[w]
                        .iter()
                        .find(|(x, _)| *x == u)
                        .map(|(_, m2)| *m2)
                        .unwrap_or(0);
                    edges += (m.min(back.max(1))) as u64;
                }
            }
        }
        let vertices = ball.len() as u64;
        // the ball is connected: independent cycles = E - V + 1
        let cycles = (edges + 1).saturating_sub(vertices);
        if cycles > 1 {
            report.violations.push(format!(
                "vertex {}: {} independent cycles in the {r}-ball",
                elem_str(&g.vertices[v]),
                cycles
            ));
        }
        if elliptic_count > 1 {
            report.violations.push(format!(
                "vertex {}: {} elliptic points in the {r}-ball",
                elem_str(&g.vertices[v]),
                elliptic_count
            ));
        }
        // interior non-elliptic vertices have degree l + 1
        for &u in &ball {
            if dist[&u] < r && !g.elliptic[u] && g.out_degree(u) != ell + 1 {
                report.violations.push(format!(
                    "vertex {}: interior degree {} != {}",
                    elem_str(&g.vertices[u]),
                    g.out_degree(u),
                    ell + 1
                ));
            }
        }
    }
    Ok(report)
}

/// The unique-2-isogeny fact: for p outside {2, 3, 5, 11}, 0 is a simple
/// root of Phi_2(54000, Y) mod p and the quadratic cofactor does not
/// vanish at 0.
pub fn phi2_unique_isogeny_fact(p: u64) -> bool {
    let phi = modular_polynomial(2).unwrap();
    let fp = ResidueField::prime_field(p);
    let at = phi.evaluate_first(&fp, &fp.from_base(54000 % p));
    // at = Y * (Y^2 - 2835810000 Y + 6549518250000) mod p
    if at.is_empty() || !fp.is_zero(&at[0]) {
        return false;
    }
    // simple root at 0: the linear coefficient (= constant of the
    // cofactor) must not vanish
    at.len() >= 2 && !fp.is_zero(&at[1])
}
