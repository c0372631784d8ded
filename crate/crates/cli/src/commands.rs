use crate::{Cli, CartanCmd, Cmd, CornersCmd, Format, GcmCmd, Global, HalfplaneCmd, ImArgs, LoopuCmd, OrthofamCmd, ParabolicCmd, PointArgs, StabilityCmd, WeylCmd};
use kmbord::corners::{self, CornerPoint, SequenceSpec, StratumLabel, TorusPoint};
use kmbord::halfplane::{self, CanonicalPair, Cusp, HPoint, Window};
use kmbord::loopu::{self, IMCoords, LoopMatrix, ScaleKind, TruncatedSeries};
use kmbord::orthofam::{self, OrthogonalFamily};
use kmbord::parabolic;
use kmbord::q::{fmt_q, parse_q};
use kmbord::rootdata::{classify_gcm, Kind, VectorJson};
use kmbord::stability::{self, Candidate, HorosphericalPoint, LeviPoint, LeviRegistry};
use kmbord::weyl::{self, BorelSubset, RealRoot, WeylWord};
use kmbord::{CartanVector, Functional, NodeSet, RootDatum, Q};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;

pub enum Output {
    Json(Value),
    Svg(String),
}

#[derive(Debug)]
pub enum CliError {
    /// The input does not fit the documented schema.
    Schema(String),
    Domain(kmbord::Error),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Schema(m) => write!(f, "schema: {m}"),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<kmbord::Error> for CliError {
    fn from(e: kmbord::Error) -> Self {
        match e {
            kmbord::Error::UnknownSuite(_) | kmbord::Error::MalformedSpec(_) => CliError::Schema(e.to_string()),
            e => CliError::Domain(e),
        }
    }
}

type Res<T> = Result<T, CliError>;

fn schema(m: impl Into<String>) -> CliError {
    CliError::Schema(m.into())
}

fn rat(s: &str) -> Res<Q> {
    parse_q(s).map_err(|e| schema(format!("{s:?} is not a rational: {}", e.0)))
}

fn rat_list(s: &str) -> Res<Vec<Q>> {
    s.split(',').map(|x| rat(x.trim())).collect()
}

fn json_arg(s: &str) -> Res<Value> {
    serde_json::from_str(s).map_err(|e| schema(format!("invalid JSON: {e}")))
}

/// The main document: the inline flag if given, else the `--in` file.
fn document(inline: &Option<String>, g: &Global, what: &str) -> Res<Value> {
    match (inline, &g.input) {
        (Some(s), _) => json_arg(s),
        (None, Some(p)) => {
            let text = std::fs::read_to_string(p).map_err(|e| schema(format!("cannot read {}: {e}", p.display())))?;
            json_arg(&text)
        }
        (None, None) => Err(schema(format!("{what} is required (inline or via --in)"))),
    }
}

/// `1,2`, `[1,2]`, `{}` or the empty string.
fn node_list(s: &str) -> Res<Vec<usize>> {
    s.trim()
        .trim_start_matches(['[', '{'])
        .trim_end_matches([']', '}'])
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<usize>().map_err(|_| schema(format!("{x:?} is not a node index"))))
        .collect()
}

fn nodes(rd: &RootDatum, s: &str) -> Res<NodeSet> {
    let j: NodeSet = node_list(s)?.into_iter().collect();
    rd.check_set(&j)?;
    Ok(j)
}

fn word(rd: &RootDatum, s: &str) -> Res<WeylWord> {
    let w = WeylWord::new(node_list(s)?);
    w.letters.iter().try_for_each(|&i| rd.check_node(i))?;
    Ok(w)
}

fn vector(rd: &RootDatum, s: &str) -> Res<CartanVector> {
    let v: VectorJson = serde_json::from_value(json_arg(s)?).map_err(|e| schema(format!("vector: {e}")))?;
    Ok(rd.vector_from_json(&v)?)
}

fn functional(rd: &RootDatum, s: &str) -> Res<Functional> {
    let v: VectorJson = serde_json::from_value(json_arg(s)?).map_err(|e| schema(format!("functional: {e}")))?;
    Ok(rd.functional_from_json(&v)?)
}

fn vjson(rd: &RootDatum, h: &CartanVector) -> Value {
    serde_json::to_value(rd.vector_json(h, "coroot").expect("coroot is a basis")).expect("serializable")
}

fn fjson(f: &Functional) -> Value {
    let coords: Vec<String> = f.m.iter().chain(std::iter::once(&f.delta)).map(fmt_q).collect();
    json!({"basis": "weight", "coords": coords})
}

fn set_json(j: &NodeSet) -> Value {
    json!(j.iter().collect::<Vec<_>>())
}

fn qmap(m: &BTreeMap<usize, Q>) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.to_string(), json!(fmt_q(v)))).collect())
}

fn point(s: &str) -> Res<HPoint> {
    HPoint::parse(s).map_err(|e| schema(e.to_string()))
}

fn series(s: &str, n: usize) -> Res<TruncatedSeries> {
    TruncatedSeries::parse(s, n).map_err(|e| schema(e.to_string()))
}

fn im_args(u: &ImArgs, n: usize) -> Res<IMCoords> {
    Ok(IMCoords::new(series(&u.sigma, n)?, series(&u.mu, n)?, series(&u.tau, n)?)?)
}

fn corner(rd: &RootDatum, s: &str) -> Res<CornerPoint> {
    Ok(CornerPoint::from_json(rd, &json_arg(s)?)?)
}

fn horo(rd: &RootDatum, p: &PointArgs) -> Res<HorosphericalPoint> {
    let levi = match p.levi.as_str() {
        "trivial" => LeviPoint::Trivial,
        z => LeviPoint::HalfPlane(point(z)?),
    };
    Ok(HorosphericalPoint { parabolic: nodes(rd, &p.j)?, levi, a: TorusPoint::exp(rd, &corner(rd, &p.a)?), u: None })
}

fn gcm_matrix(v: &Value) -> Res<Vec<Vec<i64>>> {
    serde_json::from_value(v.clone()).map_err(|e| schema(format!("matrix must be a list of integer rows: {e}")))
}

pub fn run(cli: &Cli) -> Res<Output> {
    let g = &cli.global;
    if g.format == Format::Svg && !matches!(cli.cmd, Cmd::Halfplane(HalfplaneCmd::Svg { .. })) {
        return Err(schema("--format svg is only produced by `halfplane svg`"));
    }
    if let Cmd::Gcm(GcmCmd::Classify { matrix }) = &cli.cmd {
        let a = gcm_matrix(&document(matrix, g, "--matrix")?)?;
        let (kind, null) = classify_gcm(&a)?;
        return Ok(Output::Json(match (kind, null) {
            (Kind::AffineUntwisted, Some(nv)) => json!({"kind": kind, "d": nv.d, "d_check": nv.d_check}),
            (kind, _) => json!({ "kind": kind }),
        }));
    }
    if let Cmd::Sweep { suite, n } = &cli.cmd {
        return Ok(Output::Json(kmbord::sweep::run_suite(suite, *n, g.seed)?.to_json()));
    }
    if let Cmd::Halfplane(c) = &cli.cmd {
        return halfplane_cmd(c, g);
    }
    if let Cmd::Loopu(c) = &cli.cmd {
        return loopu_cmd(c, g).map(Output::Json);
    }
    let rd = RootDatum::by_name(&g.datum)?;
    let v = match &cli.cmd {
        Cmd::Cartan(c) => cartan_cmd(&rd, c)?,
        Cmd::Weyl(c) => weyl_cmd(&rd, c)?,
        Cmd::Parabolic(c) => parabolic_cmd(&rd, c)?,
        Cmd::Corners(c) => corners_cmd(&rd, c, g)?,
        Cmd::Orthofam(c) => orthofam_cmd(&rd, c, g)?,
        Cmd::Stability(c) => stability_cmd(&rd, c, g)?,
        Cmd::Gcm(_) | Cmd::Sweep { .. } | Cmd::Halfplane(_) | Cmd::Loopu(_) => unreachable!("dispatched above"),
    };
    Ok(Output::Json(v))
}

fn cartan_cmd(rd: &RootDatum, c: &CartanCmd) -> Res<Value> {
    Ok(match c {
        CartanCmd::Coweights => {
            let (ws, c) = rd.coweight_basis();
            json!({"coweights": ws.iter().map(|w| vjson(rd, w)).collect::<Vec<_>>(), "central": vjson(rd, &c)})
        }
        CartanCmd::Rho => {
            let (rho_o, hv) = rd.rho_decomposition_classical();
            json!({"rho": fjson(&rd.rho()), "rho_o": fjson(&rho_o), "dual_coxeter": fmt_q(&hv)})
        }
        CartanCmd::Pair { h, phi } => json!({"value": fmt_q(&rd.pair(&vector(rd, h)?, &functional(rd, phi)?)?)}),
        CartanCmd::Kac { x, y } => json!({"value": fmt_q(&rd.kac_pair(&vector(rd, x)?, &vector(rd, y)?)?)}),
        CartanCmd::Tits { h } => json!({"in_tits_cone": rd.tits_cone_contains(&vector(rd, h)?)}),
        CartanCmd::Convert { h, to } => serde_json::to_value(rd.vector_json(&vector(rd, h)?, to)?).expect("serializable"),
    })
}

fn weyl_cmd(rd: &RootDatum, c: &WeylCmd) -> Res<Value> {
    Ok(match c {
        WeylCmd::Reduce { word: w } => {
            let (len, red) = weyl::length_and_reduce(rd, &word(rd, w)?)?;
            json!({"length": len, "reduced": red})
        }
        WeylCmd::Act { word: w, h } => vjson(rd, &weyl::act(rd, &word(rd, w)?, &vector(rd, h)?)?),
        WeylCmd::CosetRep { word: w, j } => json!({"rep": weyl::min_coset_rep(rd, &word(rd, w)?, &nodes(rd, j)?)?}),
        WeylCmd::Adjacency { word: w, alpha } => {
            rd.check_node(*alpha)?;
            let (b, root) = weyl::borel_adjacency(rd, &BorelSubset { word: word(rd, w)? }, *alpha)?;
            json!({"borel": b.word, "root": root})
        }
        WeylCmd::Separating { word: w, other } => {
            json!({"roots": weyl::separating_roots(rd, &word(rd, w)?, &word(rd, other)?)?})
        }
    })
}

fn parabolic_cmd(rd: &RootDatum, c: &ParabolicCmd) -> Res<Value> {
    Ok(match c {
        ParabolicCmd::RhoData { j } => {
            let d = parabolic::rho_data(rd, &nodes(rd, j)?)?;
            json!({"rho_of_p": fjson(&d.rho_of_p), "rho_p": fjson(&d.rho_p), "kappa": qmap(&d.kappa), "d_D": fmt_q(&d.d_d)})
        }
        ParabolicCmd::RhoPq { j, k } => fjson(&parabolic::rho_pq(rd, &nodes(rd, j)?, &nodes(rd, k)?)?),
        ParabolicCmd::Raghunathan { d, j } => {
            let r = parabolic::raghunathan(rd, *d, &nodes(rd, j)?)?;
            json!({"coeffs": qmap(&r.coeffs), "mu": fjson(&r.mu)})
        }
        ParabolicCmd::ClassifyRoot { root, j } => {
            let r: RealRoot = serde_json::from_value(json_arg(root)?).map_err(|e| schema(format!("root: {e}")))?;
            json!({"class": parabolic::root_in_pj(rd, &r, &nodes(rd, j)?)?})
        }
    })
}

fn split_json(rd: &RootDatum, s: &corners::GarlandSplit) -> Value {
    json!({"coords": qmap(&s.coords), "h_of_j": vjson(rd, &s.h_of_j), "h_j": vjson(rd, &s.h_j)})
}

fn corners_cmd(rd: &RootDatum, c: &CornersCmd, g: &Global) -> Res<Value> {
    Ok(match c {
        CornersCmd::Split { h, r, j } => split_json(rd, &corners::garland_split(rd, &vector(rd, h)?, &rat(r)?, &nodes(rd, j)?)?),
        CornersCmd::Relative { h, r, j, k } => {
            split_json(rd, &corners::relative_split(rd, &vector(rd, h)?, &nodes(rd, j)?, &nodes(rd, k)?, &rat(r)?)?)
        }
        CornersCmd::Paths { h, r, j, k } => {
            let (a, b) = corners::projection_paths(rd, &vector(rd, h)?, &rat(r)?, &nodes(rd, j)?, &nodes(rd, k)?)?;
            json!({"direct": vjson(rd, &a), "via_j": vjson(rd, &b), "agree": a == b})
        }
        CornersCmd::Limit { spec } => {
            let spec = SequenceSpec::from_json(&document(spec, g, "--spec")?)?;
            corners::limit_of(rd, &spec)?.to_json(rd)
        }
        CornersCmd::Window { point, m0, r0, t } => {
            json!({"contains": corners::window_contains(rd, &corner(rd, point)?, &rat(m0)?, &rat(r0)?, &rat(t)?)})
        }
        CornersCmd::Push { point } => json!({"approx_coweight_coords": corners::push_interior(rd, &corner(rd, point)?)}),
        CornersCmd::Strata { j, sigma } => {
            let labels = corners::torus_corner_strata(rd, &nodes(rd, j)?, &rat(sigma)?)?;
            json!(labels
                .iter()
                .map(|l| match l {
                    StratumLabel::Interior => json!("interior"),
                    StratumLabel::Boundary(k) => set_json(k),
                })
                .collect::<Vec<_>>())
        }
        CornersCmd::Homotopy { point, t } => {
            let p = TorusPoint::exp(rd, &corner(rd, point)?);
            torus_json(&corners::torus_homotopy(&p, &rat(t)?)?)
        }
    })
}

fn torus_json(p: &TorusPoint) -> Value {
    match p {
        TorusPoint::Interior { s, z } => {
            json!({"stratum": "interior", "s": s.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "z": z.to_string()})
        }
        TorusPoint::Stratum { j, y } => {
            json!({"stratum": set_json(j), "y": y.values().map(|x| x.to_string()).collect::<Vec<_>>()})
        }
    }
}

fn orthofam_cmd(rd: &RootDatum, c: &OrthofamCmd, g: &Global) -> Res<Value> {
    Ok(match c {
        OrthofamCmd::Verify { family } => {
            let f = OrthogonalFamily::from_json(rd, &document(family, g, "--family")?)?;
            let v = orthofam::verify_family(rd, &f)?;
            let violations: Vec<Value> = v
                .violations
                .iter()
                .map(|x| json!({"from": x.from, "to": x.to, "r": x.r.as_ref().map(fmt_q)}))
                .collect();
            json!({"valid": v.valid, "regular": v.regular, "pairs_checked": v.pairs_checked, "violations": violations})
        }
        OrthofamCmd::Orbit { t, len } => orthofam::from_weyl_orbit(rd, &vector(rd, t)?, *len)?.to_json(rd)?,
        OrthofamCmd::Witness { family, from, to } => {
            let f = OrthogonalFamily::from_json(rd, &document(family, g, "--family")?)?;
            let terms = orthofam::chain_witness(rd, &f, &word(rd, from)?, &word(rd, to)?)?;
            let sum = orthofam::witness_sum(rd, &terms);
            let terms: Vec<Value> =
                terms.iter().map(|t| json!({"root": t.root, "coroot": vjson(rd, &t.coroot), "coeff": fmt_q(&t.coeff)})).collect();
            json!({"terms": terms, "sum": vjson(rd, &sum)})
        }
    })
}

fn halfplane_cmd(c: &HalfplaneCmd, g: &Global) -> Res<Output> {
    let v = match c {
        HalfplaneCmd::Iwasawa { z } => {
            let w = halfplane::iwasawa(&point(z)?);
            json!({"a": fmt_q(&w.a), "n": fmt_q(&w.n), "rho": {"coeff": fmt_q(&w.rho.coeff), "log_of": fmt_q(&w.rho.arg), "approx": w.rho.to_f64()}})
        }
        HalfplaneCmd::Im { z, cusp } => {
            let m = Cusp::parse(cusp).map_err(|e| schema(e.to_string()))?;
            json!({"im": fmt_q(&halfplane::im_at_cusp(&point(z)?, &m))})
        }
        HalfplaneCmd::DegInst { z } => halfplane::deg_inst(&point(z)?).to_json(),
        HalfplaneCmd::CanonicalPair { z } => {
            let z = point(z)?;
            let max_im = fmt_q(&halfplane::deg_inst(&z).max_im);
            match halfplane::canonical_pair(&z) {
                CanonicalPair::SemiStable => json!({"cell": "semistable", "max_im": max_im}),
                CanonicalPair::Borel(m) => json!({"cell": "B", "cusp": m.to_string(), "max_im": max_im}),
            }
        }
        HalfplaneCmd::Reduce { z } => {
            let (gamma, w) = halfplane::reduce_to_siegel(&point(z)?);
            json!({"gamma": gamma.to_json(), "z": w.to_string(), "in_siegel": halfplane::standard_siegel_contains(&w)})
        }
        HalfplaneCmd::Svg { window, smax, resolution } => {
            let win = Window::parse(window).map_err(|e| match e {
                kmbord::Error::EmptyWindow => CliError::Domain(e),
                e => schema(e.to_string()),
            })?;
            let p = halfplane::partition_svg(&win, *resolution, *smax)?;
            if g.format == Format::Svg {
                return Ok(Output::Svg(p.svg));
            }
            json!({"circles": p.circles.iter().map(|m| m.to_string()).collect::<Vec<_>>(), "line": p.line, "svg": p.svg})
        }
    };
    Ok(Output::Json(v))
}

fn loopu_cmd(c: &LoopuCmd, g: &Global) -> Res<Value> {
    let n = g.order;
    if n == 0 {
        return Err(schema("--order must be at least 1"));
    }
    Ok(match c {
        LoopuCmd::Matrix { u } => im_args(u, n)?.to_matrix().to_json(),
        LoopuCmd::Coords { matrix } => {
            let doc = document(matrix, g, "--matrix")?;
            let rows = doc.as_array().filter(|r| r.len() == 2).ok_or_else(|| schema("matrix must have two rows"))?;
            let mut e = Vec::with_capacity(4);
            for row in rows {
                let row = row.as_array().filter(|r| r.len() == 2).ok_or_else(|| schema("rows must have two entries"))?;
                for x in row {
                    e.push(TruncatedSeries::from_json(x).map_err(|e| schema(e.to_string()))?);
                }
            }
            let [a, b, c, d]: [TruncatedSeries; 4] = e.try_into().expect("four entries");
            loopu::im_coords(&LoopMatrix::new(a, b, c, d)?)?.to_json()
        }
        LoopuCmd::Multiply { left, right } => {
            let l = IMCoords::from_json(&json_arg(left)?).map_err(|e| schema(e.to_string()))?;
            let r = IMCoords::from_json(&json_arg(right)?).map_err(|e| schema(e.to_string()))?;
            loopu::u_multiply(&l, &r)?.to_json()
        }
        LoopuCmd::Scale { u, s, kind } => {
            let kind = if kind == "loop" { ScaleKind::LoopRotation } else { ScaleKind::Torus };
            loopu::scale(&im_args(u, n)?, &rat(s)?, kind)?.to_json()
        }
        LoopuCmd::Reduce { u } => {
            let r = loopu::u_reduce(&im_args(u, n)?)?;
            json!({"reduced": r.reduced.to_json(), "gamma": r.gamma.to_json()})
        }
        LoopuCmd::Siegel { u, a, t, omega } => {
            let rd = RootDatum::by_name("affine-sl2")?;
            let om = rat_list(omega)?;
            if om.len() != 2 {
                return Err(schema("--omega takes two endpoints"));
            }
            let a = TorusPoint::exp(&rd, &corner(&rd, a)?);
            json!({"contains": loopu::siegel_membership(&a, &im_args(u, n)?, &rat(t)?, (&om[0], &om[1]))})
        }
    })
}

fn stability_cmd(rd: &RootDatum, c: &StabilityCmd, g: &Global) -> Res<Value> {
    let reg = LeviRegistry::standard(rd);
    Ok(match c {
        StabilityCmd::CellContains { j, a, t } => {
            let a = TorusPoint::exp(rd, &corner(rd, a)?);
            json!({"contains": stability::ap_cell_contains(rd, &a, &nodes(rd, j)?, &rat(t)?)?})
        }
        StabilityCmd::CheckCanonical { p } => {
            let pt = horo(rd, p)?;
            json!({"canonical": stability::check_canonical(rd, &reg, &pt.parabolic.clone(), &pt)?})
        }
        StabilityCmd::Cell { p } => stability::pbord_cell(rd, &reg, &horo(rd, p)?)?.to_json(),
        StabilityCmd::DegQ { candidates } => {
            let doc = document(candidates, g, "--candidates")?;
            let items = doc.as_array().ok_or_else(|| schema("candidates must be a list"))?;
            let cands = items
                .iter()
                .map(|c| {
                    let set = |key: &str| -> Res<NodeSet> {
                        let v: Vec<usize> = serde_json::from_value(c[key].clone()).map_err(|e| schema(format!("{key}: {e}")))?;
                        let s: NodeSet = v.into_iter().collect();
                        rd.check_set(&s)?;
                        Ok(s)
                    };
                    let h: VectorJson = serde_json::from_value(c["h"].clone()).map_err(|e| schema(format!("h: {e}")))?;
                    Ok(Candidate { j: set("J")?, k: set("K")?, h: rd.vector_from_json(&h)? })
                })
                .collect::<Res<Vec<_>>>()?;
            let d = stability::deg_q_inst_over(rd, &cands)?;
            json!({"value": fmt_q(&d.value), "index": d.index})
        }
        StabilityCmd::CentralShift { deg, mc } => json!({"value": fmt_q(&stability::central_shift(rd, &rat(deg)?, &rat(mc)?))}),
        StabilityCmd::Family { n, r } => {
            let f = stability::semistable_family(rd, *n, &rat(r)?)?;
            json!({
                "h": vjson(rd, &f.h),
                "in_cell": f.in_cell,
                "limit": {"s": f.limit.s.to_string(), "h": vjson(rd, &f.limit.h), "degree": fmt_q(&f.limit.degree), "semistable": f.limit.semistable},
            })
        }
        StabilityCmd::Threshold { c, log_t } => {
            let (c, b) = (rat(c)?, rat(log_t)?);
            if c < Q::from_integer(0.into()) || b < Q::from_integer(0.into()) {
                return Err(CliError::Domain(kmbord::Error::Invalid("C and the log bound must be nonnegative".into())));
            }
            json!({"M": fmt_q(&stability::rho_threshold(rd, &c, &b))})
        }
    })
}
