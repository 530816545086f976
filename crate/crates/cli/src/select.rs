//! Subgroup selectors: named presets and explicit generator lists in 1-based cycle notation.

use qplab::group::{Elt, GroupSpec, GroupTable, Subgroup};
use qplab::{Error, Result};

/// Parses one permutation such as `(1 2 3)(4 5)`; `()` and `1` denote the identity.
/// Returns 0-based cycles, validated against `degree`.
pub fn parse_cycles(text: &str, degree: usize) -> Result<Vec<Vec<usize>>> {
    let t = text.trim();
    if t.is_empty() || t == "()" || t == "1" {
        return Ok(Vec::new());
    }
    let mut cycles = Vec::new();
    let mut rest = t;
    while !rest.is_empty() {
        let body_start = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::InvalidSpec(format!("'{t}': expected '(' at '{rest}'")))?;
        let close = body_start.find(')').ok_or_else(|| Error::InvalidSpec(format!("'{t}': unclosed cycle")))?;
        let body = &body_start[..close];
        let mut cycle = Vec::new();
        for tok in body.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()) {
            let pt: usize =
                tok.parse().map_err(|_| Error::InvalidSpec(format!("'{t}': '{tok}' is not a point")))?;
            if pt == 0 {
                return Err(Error::InvalidSpec(format!("'{t}': points are 1-based, found 0")));
            }
            cycle.push(pt - 1);
        }
        if cycle.len() > 1 {
            cycles.push(cycle);
        }
        rest = body_start[close + 1..].trim_start();
    }
    // the group-spec validator reports out-of-range and repeated points
    GroupSpec::new("selector", degree, vec![cycles.clone()])?;
    Ok(cycles)
}

/// Parses `;`-separated permutations and looks each up in `g`.
pub fn parse_gens(g: &GroupTable, text: &str) -> Result<Vec<Elt>> {
    text.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let cycles = parse_cycles(s, g.degree())?;
            g.id_of_cycles(&cycles)
                .ok_or_else(|| Error::InvalidSpec(format!("'{}' is not an element of {}", s.trim(), g_name(g))))
        })
        .collect()
}

fn g_name(g: &GroupTable) -> String {
    format!("the loaded group of order {}", g.order())
}

fn is_even(g: &GroupTable, x: Elt) -> bool {
    g.element(x).cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 0
}

/// Resolves a named preset:
/// `whole`, `trivial`, `derived`, `alt`/`even` (even permutations of the group),
/// `altN` (as `alt`, requiring degree `N`), `comp:i` (the i-th component, 1-based),
/// `stab:k` (stabilizer of point k, 1-based), `sylow:p`, `center`.
pub fn preset(g: &GroupTable, name: &str) -> Result<Subgroup> {
    let whole = Subgroup::whole(g);
    let name = name.trim();
    let even = || {
        let evens: Vec<Elt> = (0..g.order() as Elt).filter(|&x| is_even(g, x)).collect();
        g.closure(&evens)
    };
    if let Some(rest) = name.strip_prefix("comp:") {
        let i: usize = rest.parse().map_err(|_| Error::InvalidSpec(format!("bad component index '{rest}'")))?;
        let comps = g.components(&whole)?;
        return comps.get(i.wrapping_sub(1)).cloned().ok_or_else(|| {
            Error::InvalidSpec(format!("component {i} requested but the group has {}", comps.len()))
        });
    }
    if let Some(rest) = name.strip_prefix("stab:") {
        let k: usize = rest.parse().map_err(|_| Error::InvalidSpec(format!("bad point '{rest}'")))?;
        if k == 0 || k > g.degree() {
            return Err(Error::DegreeMismatch { point: k, degree: g.degree() });
        }
        let fixing: Vec<Elt> = (0..g.order() as Elt).filter(|&x| g.element(x).images[k - 1] as usize == k - 1).collect();
        return Ok(g.closure(&fixing));
    }
    if let Some(rest) = name.strip_prefix("sylow:") {
        let p: u32 = rest.parse().map_err(|_| Error::InvalidSpec(format!("bad prime '{rest}'")))?;
        return Ok(g.sylow(&whole, p));
    }
    if let Some(rest) = name.strip_prefix("alt") {
        if !rest.is_empty() {
            let n: usize = rest.parse().map_err(|_| Error::InvalidSpec(format!("unknown preset '{name}'")))?;
            if n != g.degree() {
                return Err(Error::InvalidSpec(format!("preset '{name}' needs degree {n}, the group has degree {}", g.degree())));
            }
        }
        return Ok(even());
    }
    match name {
        "whole" => Ok(whole),
        "trivial" => Ok(Subgroup::trivial()),
        "derived" => Ok(g.derived_subgroup(&whole)),
        "even" => Ok(even()),
        "center" => Ok(g.center(&whole)),
        _ => Err(Error::InvalidSpec(format!("unknown subgroup preset '{name}'"))),
    }
}

/// A selector given either as a preset or as explicit generators (not both).
pub fn select(g: &GroupTable, preset_name: Option<&str>, gens: Option<&str>) -> Result<Option<Subgroup>> {
    match (preset_name, gens) {
        (Some(_), Some(_)) => Err(Error::InvalidSpec("give a preset or generators, not both".into())),
        (Some(p), None) => preset(g, p).map(Some),
        (None, Some(text)) => Ok(Some(g.closure(&parse_gens(g, text)?))),
        (None, None) => Ok(None),
    }
}
