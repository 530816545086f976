//! One function per verb; each returns an [`Outcome`] or a [`CliError`].

use std::path::Path;

use qplab::group::{prime_divisors, GroupTable, Subgroup};
use qplab::homology::{lefschetz_profile, reduced_betti, BettiProfile, ChainComplex};
use qplab::poset::Poset;
use qplab::propagation::{classical_check, component_propagation, qd_check, ClassicalData, ClassicalKind};
use qplab::psubgroup::{build_p_poset, fixed_subposet, PKind};
use qplab::replacement::{self, certify, image_check, subgroup_label, ReplacementKind};
use qplab::robinson::{alternating_q, criterion_check, lqc_check, orbit_lemma_check, r0_check, sylow_r_robinson};
use serde_json::{json, Value};

use crate::select::select;
use crate::{
    load_group, CliError, CliResult, Command, Opts, Outcome, PosetAction, PropagateAction, RobinsonAction,
    VerifyAction,
};

pub fn execute(cmd: &Command) -> CliResult<Outcome> {
    match cmd {
        Command::Group { file, opts } => group(file, opts),
        Command::Poset { action: PosetAction::Build { file, opts } } => poset_build(file, opts),
        Command::Homology { file, opts } => homology(file, opts),
        Command::Verify { action } => match action {
            VerifyAction::Equiv { file, left, right, fixed, opts } => verify_equiv(file, left, right, *fixed, opts),
            VerifyAction::Certify { file, opts } => verify_certify(file, opts),
            VerifyAction::Image { file, opts } => verify_image(file, opts),
            VerifyAction::Conical { file, opts } => verify_conical(file, opts),
        },
        Command::Fixed { file, opts } => fixed(file, opts),
        Command::Lefschetz { file, opts } => lefschetz(file, opts),
        Command::Robinson { action } => match action {
            RobinsonAction::R0 { file, opts } => robinson_r0(file, opts),
            RobinsonAction::Sylow { file, opts } => robinson_sylow(file, opts),
            RobinsonAction::Lqc { file, opts } => robinson_lqc(file, opts),
            RobinsonAction::Criterion { file, opts } => robinson_criterion(file, opts),
            RobinsonAction::Orbit { file, opts } => robinson_orbit(file, opts),
        },
        Command::Propagate { action } => match action {
            PropagateAction::Component { file, opts } => propagate_component(file, opts),
            PropagateAction::Classical { file, opts } => propagate_classical(file, opts),
            PropagateAction::Qd { file, opts } => propagate_qd(file, opts),
        },
        Command::Scenario { .. } => Err(CliError::Usage("scenarios are run by the dispatcher".into())),
    }
}

// ---------------------------------------------------------------------------
// shared helpers

fn need_p(opts: &Opts) -> CliResult<u32> {
    opts.p.ok_or_else(|| CliError::Usage("--p is required".into()))
}

fn need_q(opts: &Opts) -> CliResult<u32> {
    opts.q.ok_or_else(|| CliError::Usage("--q is required".into()))
}

fn h_of(g: &GroupTable, opts: &Opts) -> CliResult<Option<Subgroup>> {
    Ok(select(g, opts.h.as_deref(), opts.h_gens.as_deref())?)
}

fn k_of(g: &GroupTable, opts: &Opts) -> CliResult<Option<Subgroup>> {
    Ok(select(g, opts.k.as_deref(), opts.k_gens.as_deref())?)
}

/// `--L`, falling back to `--H`, then to the first component.
fn l_of(g: &GroupTable, opts: &Opts) -> CliResult<Subgroup> {
    if let Some(l) = select(g, opts.l.as_deref(), opts.l_gens.as_deref())? {
        return Ok(l);
    }
    if let Some(h) = h_of(g, opts)? {
        return Ok(h);
    }
    Ok(crate::select::preset(g, "comp:1")?)
}

/// `--Q`, defaulting to the three-case subgroup of the alternating group.
fn q_of(g: &GroupTable, opts: &Opts) -> CliResult<Subgroup> {
    match select(g, opts.qsub.as_deref(), opts.q_gens.as_deref())? {
        Some(q) => Ok(q),
        None => Ok(alternating_q(g)?),
    }
}

fn group_header(g: &GroupTable) -> Value {
    json!({"name": g.name, "degree": g.degree(), "order": g.order()})
}

fn betti_json(b: &BettiProfile) -> Value {
    b.to_json()["betti"].clone()
}

fn p_kind(name: &str) -> CliResult<PKind> {
    name.parse::<PKind>().map_err(|_| CliError::Usage(format!("'{name}' is not a p-subgroup poset kind (sp, ap, bp, iap, isp)")))
}

/// A poset selected by `--kind`, with a description of what was built.
struct Built {
    poset: Poset,
    kind: String,
    extra: Value,
}

fn build_kind(g: &GroupTable, opts: &Opts, p: u32) -> CliResult<Built> {
    let kind = opts.kind.clone().unwrap_or_else(|| "ap".into());
    if let Ok(pk) = kind.parse::<PKind>() {
        let ambient = h_of(g, opts)?.unwrap_or_else(|| Subgroup::whole(g));
        let x = build_p_poset(g, &ambient, p, pk)?;
        let extra = json!({"ambient_order": ambient.order()});
        return Ok(Built { poset: x.poset, kind, extra });
    }
    let rk: ReplacementKind = kind.parse()?;
    let h = if rk.needs_component() {
        l_of(g, opts)?
    } else {
        h_of(g, opts)?.ok_or_else(|| CliError::Usage(format!("--kind {kind} needs --H or --H-gens")))?
    };
    let k = k_of(g, opts)?;
    let x = replacement::build(g, rk, &h, k.as_ref(), p)?;
    let extra = json!({
        "H": subgroup_label(g, &h),
        "H_order": h.order(),
        "K": k.as_ref().map(|k| subgroup_label(g, k)),
        "outers": x.outer_count(),
        "conical_outers": x.conical_outers.len(),
    });
    Ok(Built { poset: x.poset, kind, extra })
}

// ---------------------------------------------------------------------------
// verbs

fn group(file: &Path, opts: &Opts) -> CliResult<Outcome> {
    let g = load_group(file, opts)?;
    let whole = Subgroup::whole(&g);
    let primes = match opts.p {
        Some(p) => vec![p],
        None => prime_divisors(g.order()),
    };
    let locals: Vec<Value> = primes
        .iter()
        .map(|&p| {
            json!({
                "p": p,
                "sylow_order": g.sylow(&whole, p).order(),
                "p_rank": g.p_rank(&whole, p),
                "O_p_order": g.core_p(&whole, p).order(),
                "O_p_prime_order": g.core_p_prime(&whole, p).order(),
            })
        })
        .collect();
    let fd = g.fitting_data(&whole)?;
    let mut out = group_header(&g);
    out["primes"] = json!(prime_divisors(g.order()));
    out["local"] = json!(locals);
    out["center_order"] = json!(g.center(&whole).order());
    out["derived_order"] = json!(g.derived_subgroup(&whole).order());
    out["fitting_order"] = json!(fd.f.order());
    out["components"] = json!(fd.components.iter().map(|l| json!({"label": subgroup_label(&g, l), "order": l.order()})).collect::<Vec<_>>());
    Ok(Outcome::ok(out))
}

fn poset_build(file: &Path, opts: &Opts) -> CliResult<Outcome> {
    let g = load_group(file, opts)?;
    let p = need_p(opts)?;
    let b = build_kind(&g, opts, p)?;
    let edges = b.poset.hasse_edges();
    if let Some(path) = &opts.dot {
        std::fs::write(path, b.poset.to_dot()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let out = json!({
        "group": group_header(&g),
        "kind": b.kind,
        "p": p,
        "construction": b.extra,
        "vertices": b.poset.len(),
        "relations": b.poset.relation_count(),
        "hasse_edges": edges.len(),
        "elements": b.poset.labels(),
        "covers": edges.iter().map(|&(i, j)| [i, j]).collect::<Vec<_>>(),
    });
    let mut tsv = String::from("lower\tupper\n");
    for (i, j) in &edges {
        tsv.push_str(&format!("{}\t{}\n", b.poset.label(*i), b.poset.label(*j)));
    }
    Ok(Outcome::ok(out).with_tsv(tsv))
}

/// Betti numbers up to `limit` from chains of dimension at most `limit + 1`.
fn limited_betti(x: &Poset, limit: Option<i32>) -> CliResult<BettiProfile> {
    match limit {
        None => Ok(reduced_betti(x)?),
        Some(d) => {
            let cx = ChainComplex::of_poset(x)?.filter(|c| c.len() as i32 <= d + 2);
            let mut b = cx.reduced_betti();
            b.betti.truncate((d + 2).max(0) as usize);
            Ok(b)
        }
    }
}

fn homology(file: &Path, opts: &Opts) -> CliResult<Outcome> {
    let g = load_group(file, opts)?;
    let p = need_p(opts)?;
    let b = build_kind(&g, opts, p)?;
    let betti = limited_betti(&b.poset, opts.degree_limit)?;
    let mut tsv = String::from("degree\tbetti\n");
    for (i, v) in betti.betti.iter().enumerate() {
        tsv.push_str(&format!("{}\t{v}\n", i as i32 - 1));
    }
    let out = json!({
        "group": group_header(&g),
        "kind": b.kind,
        "p": p,
        "construction": b.extra,
        "vertices": b.poset.len(),
        "degree_limit": opts.degree_limit,
        "betti": betti_json(&betti),
        "euler": if opts.degree_limit.is_none() { json!(betti.euler()) } else { Value::Null },
    });
    Ok(Outcome::ok(out).with_tsv(tsv))
}

fn verify_equiv(file: &Path, left: &str, right: &str, fixed: bool, opts: &Opts) -> CliResult<Outcome> {
    let g = load_group(file, opts)?;
    let p = need_p(opts)?;
    let (lk, rk) = (p_kind(left)?, p_kind(right)?);
    let whole = Subgroup::whole(&g);
    let lx = build_p_poset(&g, &whole, p, lk)?;
    let rx = build_p_poset(&g, &whole, p, rk)?;
    let lb = reduced_betti(&lx.poset)?;
    let rb = reduced_betti(&rx.poset)?;
    let mut equal = lb == rb;
    let mut classes = Vec::new();
    if fixed {
        let lp = lefschetz_profile(&lx.poset, &g, &whole)?;
        let rp = lefschetz_profile(&rx.poset, &g, &whole)?;
        for (a, b) in lp.rows.iter().zip(&rp.rows) {
            let same = a.betti == b.betti;
            equal &= same;
            classes.push(json!({
                "representative": g.fmt_elt(a.representative),
                "left": betti_json(&a.betti),
                "right": betti_json(&b.betti),
                "equal": same,
            }));
        }
    }
    let out = json!({
        "group": group_header(&g),
        "p": p,
        "left": {"kind": left, "vertices": lx.poset.len(), "betti": betti_json(&lb)},
        "right": {"kind": right, "vertices": rx.poset.len(), "betti": betti_json(&rb)},
        "classes": classes,
        "equal": equal,
    });
    Ok(Outcome::checked(out, equal))
}

fn verify_certify(file: &Path, opts: &Opts) -> CliResult<Outcome> {
    let g = load_group(file, opts)?;
    let p = need_p(opts)?;
    let kind: ReplacementKind =
        opts.kind.as_deref().ok_or_else(|| CliError::Usage("--kind is required".into()))?.parse()?;
    let h = if kind.needs_component() {
        l_of(&g, opts)?
    } else {
        h_of(&g, opts)?.ok_or_else(|| CliError::Usage("--H or --H-gens is required".into()))?
    };
    let k = k_of(&g, opts)?;
    let x = replacement::build(&g, kind, &h, k.as_ref(), p)?;
    let c = certify(&g, &x)?;
    let mut out = c.to_json();
    out["group"] = group_header(&g);
    out["p"] = json!(p);
    Ok(Outcome::checked(out, c.passed()))
}

fn verify_image(file: &Path, opts: &Opts) -> CliResult<Outcome> {
    let g = load_group(file, opts)?;
    let p = need_p(opts)?;
    let l = l_of(&g, opts)?;
    let r = image_check(&g, &l, p)?;
    let out = json!({
        "group": group_header(&g),
        "p": p,
        "component": subgroup_label(&g, &l),
        "all_conical": r.all_conical,
        "outers": r.outers,
        "image_size": r.image_size,
        "inclusion": r.inclusion.to_json(),
        "betti_component": betti_json(&r.betti_l),
        "betti_image": betti_json(&r.betti_image),
        "passed": r.passed(),
    });
    Ok(Outcome::checked(out, r.passed()))
}

fn verify_conical(file: &Path, opts: &Opts) -> CliResult<Outcome> {
    let g = load_group(file, opts)?;
    let p = need_p(opts)?;
    let whole = Subgroup::whole(&g);
    let op = g.core_p(&whole, p);
    if op.is_trivial() {
        let out = json!({"group": group_header(&g), "p": p, "O_p_order": 1, "applicable": false});
        return Ok(Outcome::ok(out));
    }
    let mut ok = true;
    let mut kinds = serde_json::Map::new();
    for kind in [PKind::Sp, PKind::Ap] {
        let b = reduced_betti(&build_p_poset(&g, &whole, p, kind)?.poset)?;
        ok &= b.is_acyclic();
        kinds.insert(kind.name().into(), betti_json(&b));
    }
    let out = json!({"group": group_header(&g), "p": p, "O_p_order": op.order(), "applicable": true, "betti": kinds, "acyclic": ok});
    Ok(Outcome::checked(out, ok))
}

fn p_kind_poset(g: &GroupTable, opts: &Opts, p: u32) -> CliResult<(PKind, Poset)> {
    let kind = p_kind(opts.kind.as_deref().unwrap_or("ap"))?;
    Ok((kind, build_p_poset(g, &Subgroup::whole(g), p, kind)?.poset))
}

fn fixed(file: &Path, opts: &Opts) -> CliResult<Outcome> {
    let g = load_group(file, opts)?;
    let p = need_p(opts)?;
    let acting = h_of(&g, opts)?.ok_or_else(|| CliError::Usage("--H or --H-gens is required".into()))?;
    let (kind, x) = p_kind_poset(&g, opts, p)?;
    let f = fixed_subposet(&x, &g, &acting);
    let betti = reduced_betti(&f)?;
    let incomparable = (0..f.len()).all(|i| (0..f.len()).all(|j| !f.lt(i, j)));
    let out = json!({
        "group": group_header(&g),
        "kind": kind.name(),
        "p": p,
        "acting": subgroup_label(&g, &acting),
        "acting_order": acting.order(),
        "size": f.len(),
        "elements": f.labels(),
        "antichain": incomparable,
        "betti": betti_json(&betti),
        "euler": betti.euler(),
    });
    Ok(Outcome::ok(out))
}

fn lefschetz(file: &Path, opts: &Opts) -> CliResult<Outcome> {
    let g = load_group(file, opts)?;
    let p = need_p(opts)?;
    let (kind, x) = p_kind_poset(&g, opts, p)?;
    let prof = lefschetz_profile(&x, &g, &Subgroup::whole(&g))?;
    let rows: Vec<Value> = prof
        .rows
        .iter()
        .map(|r| {
            json!({
                "representative": g.fmt_elt(r.representative),
                "class_size": r.class_size,
                "fixed_size": r.fixed_size,
                "euler": r.euler,
                "betti": betti_json(&r.betti),
            })
        })
        .collect();
    let out = json!({
        "group": group_header(&g),
        "kind": kind.name(),
        "p": p,
        "classes": rows,
        "witness": prof.witness().map(|r| g.fmt_elt(r.representative)),
    });
    Ok(Outcome::ok(out).with_tsv(prof.to_tsv(&g)))
}

fn robinson_r0(file: &Path, opts: &Opts) -> CliResult<Outcome> {
    let g = load_group(file, opts)?;
    let (p, q) = (need_p(opts)?, need_q(opts)?);
    let l = match select(&g, opts.l.as_deref(), opts.l_gens.as_deref())? {
        Some(l) => l,
        None => g.derived_subgroup(&Subgroup::whole(&g)),
    };
    let qs = q_of(&g, opts)?;
    let c = r0_check(&g, &l, &qs, p, q)?;
    let mut out = c.to_json();
    out["group"] = group_header(&g);
    Ok(Outcome::checked(out, c.satisfies_r0()))
}

fn robinson_sylow(file: &Path, opts: &Opts) -> CliResult<Outcome> {
    let g = load_group(file, opts)?;
    let (p, q) = (need_p(opts)?, need_q(opts)?);
    let l = match select(&g, opts.l.as_deref(), opts.l_gens.as_deref())? {
        Some(l) => l,
        None => g.derived_subgroup(&Subgroup::whole(&g)),
    };
    let c = sylow_r_robinson(&g, &l, p, q)?;
    let mut out = c.to_json();
    out["group"] = group_header(&g);
    Ok(Outcome::checked(out, c.satisfies_r0()))
}

fn robinson_lqc(file: &Path, opts: &Opts) -> CliResult<Outcome> {
    let g = load_group(file, opts)?;
    let (p, q) = (need_p(opts)?, need_q(opts)?);
    let comps = g.fitting_data(&Subgroup::whole(&g))?.components;
    let qs: Vec<Subgroup> = match select(&g, opts.qsub.as_deref(), opts.q_gens.as_deref())? {
        // a supplied Q is split across the components
        Some(big) => comps.iter().map(|l| big.intersection(l)).collect(),
        None if comps.len() == 1 => vec![alternating_q(&g)?],
        None => return Err(CliError::Usage("several components: give Q with --Q or --Q-gens".into())),
    };
    let r = lqc_check(&g, &qs, p, q)?;
    let mut out = r.to_json();
    out["group"] = group_header(&g);
    out["passed"] = json!(r.passed());
    Ok(Outcome::checked(out, r.passed()))
}

fn robinson_criterion(file: &Path, opts: &Opts) -> CliResult<Outcome> {
    let g = load_group(file, opts)?;
    let (p, q) = (need_p(opts)?, need_q(opts)?);
    let l = match select(&g, opts.l.as_deref(), opts.l_gens.as_deref())? {
        Some(l) => l,
        None => g.derived_subgroup(&Subgroup::whole(&g)),
    };
    let r = criterion_check(&g, &l, p, q)?;
    let mut out = r.to_json();
    out["group"] = group_header(&g);
    Ok(Outcome::ok(out))
}

fn robinson_orbit(file: &Path, opts: &Opts) -> CliResult<Outcome> {
    let g = load_group(file, opts)?;
    let p = need_p(opts)?;
    let qs = q_of(&g, opts)?;
    let r = orbit_lemma_check(&g, &qs, p)?;
    let out = json!({
        "group": group_header(&g),
        "p": p,
        "Q": subgroup_label(&g, &qs),
        "fixed_members": r.fixed_members,
        "nontrivial_pairs": r.nontrivial_pairs,
        "unstable_pairs": r.unstable_pairs,
        "violation": r.violation.as_ref().map(|(e, o)| json!({"E": e, "orbit": o.iter().map(|i| i + 1).collect::<Vec<_>>()})),
        "holds": r.holds(),
    });
    Ok(Outcome::checked(out, r.holds()))
}

fn propagate_component(file: &Path, opts: &Opts) -> CliResult<Outcome> {
    let g = load_group(file, opts)?;
    let p = need_p(opts)?;
    let degree = opts.degree.ok_or_else(|| CliError::Usage("--degree is required".into()))?;
    let l = l_of(&g, opts)?;
    let r = component_propagation(&g, &l, p, degree)?;
    let ok = r.certified() && r.direct_confirms();
    let mut out = r.to_json();
    out["group"] = group_header(&g);
    Ok(Outcome::checked(out, ok))
}

fn propagate_classical(file: &Path, opts: &Opts) -> CliResult<Outcome> {
    let g = load_group(file, opts)?;
    let p = need_p(opts)?;
    let kind: ClassicalKind =
        opts.kind.as_deref().ok_or_else(|| CliError::Usage("--kind as027|kp314 is required".into()))?.parse()?;
    let h = h_of(&g, opts)?.ok_or_else(|| CliError::Usage("--H or --H-gens is required".into()))?;
    let k = k_of(&g, opts)?.ok_or_else(|| CliError::Usage("--K or --K-gens is required".into()))?;
    let r = classical_check(kind, &g, &h, &k, p, None, &ClassicalData::default())?;
    let ok = r.hypotheses_hold() && r.conclusion_holds();
    let mut out = r.to_json();
    out["group"] = group_header(&g);
    Ok(Outcome::checked(out, ok))
}

fn propagate_qd(file: &Path, opts: &Opts) -> CliResult<Outcome> {
    let g = load_group(file, opts)?;
    let p = need_p(opts)?;
    let r = qd_check(&g, p)?;
    let mut out = r.to_json();
    out["group"] = group_header(&g);
    Ok(Outcome::checked(out, r.passed()))
}
