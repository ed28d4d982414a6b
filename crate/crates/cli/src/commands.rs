use fronts::classify::{self, ClassifyOptions, DualityReport, SingularityClass, Theorem};
use fronts::cusp::{self, CurveDerivatives, CuspReport, CuspTolerances, OsculatingCycloid};
use fronts::geometry::{self, HomogeneousPoint};
use fronts::report::{self, Real17};
use fronts::zeroset::{self, CensusOptions, Grid, ZeroFunction};
use fronts::{Complex64, Error, Field, MapKind, MapSpec, Scalar};
use serde::Serialize;

use crate::args::{Command, Common, FunctionArg};
use crate::output::{error_exit, failure, render, Input, Outcome, Settings};
use crate::output::{EXIT_INPUT, EXIT_NONDIAGNOSABLE, EXIT_OK, EXIT_VIOLATION};

pub fn run(cmd: &Command) -> Outcome {
    match cmd {
        Command::Classify { common, point, dual } => classify(common, point, *dual),
        Command::Dual { common, point, theorem } => dual(common, point, theorem.map(Theorem::from)),
        Command::Trace { common, grid, function } => trace(common, *grid, *function),
        Command::Euler { common, grid, max_grid } => euler(common, *grid, *max_grid),
        Command::Cusp {
            map,
            point,
            window,
            regular,
        } => cusp(map, point, *window, *regular),
    }
}

/// A prepared run: the parsed map with its echo and settings.
struct Ctx {
    command: &'static str,
    input: Input,
    settings: Settings,
    spec: MapSpec,
}

impl Ctx {
    fn load(command: &'static str, path: &std::path::Path, point: Option<&str>, settings: Settings) -> Result<Ctx, Outcome> {
        let mut input = Input {
            path: path.display().to_string(),
            map: None,
            point: point.map(str::to_string),
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| failure(command, &input, &settings, "io", &e, EXIT_INPUT))?;
        let spec = MapSpec::parse(&text).map_err(|e| failure(command, &input, &settings, e.code(), &e, EXIT_INPUT))?;
        input.map = Some(spec.to_string());
        Ok(Ctx {
            command,
            input,
            settings,
            spec,
        })
    }

    fn fail(&self, e: &Error) -> Outcome {
        failure(self.command, &self.input, &self.settings, e.code(), e, error_exit(e))
    }

    fn point<S: Scalar>(&self, text: &str) -> Result<Vec<S>, Outcome> {
        let p: Vec<S> = self.spec.parse_point(text).map_err(|e| self.fail(&e))?;
        for ((var, d), x) in self.spec.vars.iter().zip(&self.spec.domain).zip(&p) {
            if let Some(d) = d {
                if x.im() != 0.0 || !d.contains(x.re()) {
                    let e = Error::Domain(format!("{var} = {} outside [{}, {}]", x.re(), d.lo, d.hi));
                    return Err(self.fail(&e));
                }
            }
        }
        Ok(p)
    }

    fn outcome<T: Serialize>(&self, point: Option<Vec<report::ScalarRepr>>, exit: u8, result: T) -> Outcome {
        Outcome {
            report: render(self.command, &self.input, point, &self.settings, exit, result),
            files: Vec::new(),
            exit,
            problems: Vec::new(),
        }
    }
}

macro_rules! tryo {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(o) => return o,
        }
    };
}

fn classify_settings(common: &Common) -> Settings {
    Settings {
        order: Some(common.order.into()),
        tolerances: Some(common.tolerances()),
        ..Default::default()
    }
}

fn classify(common: &Common, point: &str, dual: bool) -> Outcome {
    let settings = Settings {
        dual,
        ..classify_settings(common)
    };
    let ctx = tryo!(Ctx::load("classify", &common.map, Some(point), settings));
    let opts = common.classify_options();
    match ctx.spec.field {
        Field::Real => classify_at::<f64>(&ctx, point, dual, &opts),
        Field::Complex => classify_at::<Complex64>(&ctx, point, dual, &opts),
    }
}

#[derive(Serialize)]
#[serde(bound = "")]
struct Single<S: Scalar> {
    analysis: &'static str,
    label: String,
    classification: SingularityClass<S>,
}

#[derive(Serialize)]
#[serde(bound = "")]
struct Paired<S: Scalar> {
    label: String,
    dual_label: String,
    pairing: DualityReport<S>,
}

fn nondiagnosable(which: &str, c: &SingularityClass<impl Scalar>) -> String {
    match c.reason {
        Some(r) => format!("nondiagnosable ({which}): {r:?}"),
        None => format!("nondiagnosable ({which})"),
    }
}

fn pair_exit<S: Scalar>(r: &DualityReport<S>) -> (u8, Vec<String>) {
    let mut problems = Vec::new();
    if r.primary.verdict.is_degenerate() {
        problems.push(nondiagnosable("primary", &r.primary));
    }
    if r.dual.verdict.is_degenerate() {
        problems.push(nondiagnosable("dual", &r.dual));
    }
    if !problems.is_empty() {
        return (EXIT_NONDIAGNOSABLE, problems);
    }
    if !r.consistent {
        let msg = format!(
            "pairing {:?} fails: {} against {}",
            r.theorem,
            r.primary.verdict.label(),
            r.dual.verdict.label()
        );
        return (EXIT_VIOLATION, vec![msg]);
    }
    (EXIT_OK, problems)
}

fn classify_at<S: Scalar>(ctx: &Ctx, text: &str, dual: bool, opts: &ClassifyOptions) -> Outcome {
    let point: Vec<S> = tryo!(ctx.point(text));
    let echo = Some(report::scalars(&point));
    if dual {
        let r = match classify::duality_check(&ctx.spec, &point, None, opts) {
            Ok(r) => r,
            Err(e) => return ctx.fail(&e),
        };
        let (exit, problems) = pair_exit(&r);
        let result = Paired {
            label: r.primary.verdict.label(),
            dual_label: r.dual.verdict.label(),
            pairing: r,
        };
        let mut o = ctx.outcome(echo, exit, result);
        o.problems = problems;
        return o;
    }
    let (analysis, r) = match ctx.spec.kind {
        MapKind::Affine | MapKind::Curve if ctx.spec.normal.is_some() => {
            ("front-singularity", classify::classify_front_singularity(&ctx.spec, &point, opts))
        }
        MapKind::Affine | MapKind::Curve | MapKind::Projective => {
            ("inflection", classify::classify_inflection(&ctx.spec, &point, opts))
        }
        MapKind::PlaneMap => ("morin", classify::classify_morin(&ctx.spec, &point, opts)),
    };
    let r = match r {
        Ok(r) => r,
        Err(e) => return ctx.fail(&e),
    };
    let degenerate = r.verdict.is_degenerate();
    let problems = if degenerate { vec![nondiagnosable("primary", &r)] } else { Vec::new() };
    let exit = if degenerate { EXIT_NONDIAGNOSABLE } else { EXIT_OK };
    let mut o = ctx.outcome(
        echo,
        exit,
        Single {
            analysis,
            label: r.verdict.label(),
            classification: r,
        },
    );
    o.problems = problems;
    o
}

#[derive(Serialize)]
#[serde(bound = "")]
struct DualResult<S: Scalar> {
    theorem: Theorem,
    /// `[ν(p)]` for the affine Gauss map, `[G(p)]` for the dual front.
    dual_point: Vec<report::ScalarRepr>,
    label: String,
    dual_label: String,
    pairing: DualityReport<S>,
}

fn dual(common: &Common, point: &str, theorem: Option<Theorem>) -> Outcome {
    let settings = Settings {
        theorem: theorem.map(|t| format!("{t:?}")),
        ..classify_settings(common)
    };
    let ctx = tryo!(Ctx::load("dual", &common.map, Some(point), settings));
    let opts = common.classify_options();
    match ctx.spec.field {
        Field::Real => dual_at::<f64>(&ctx, point, theorem, &opts),
        Field::Complex => dual_at::<Complex64>(&ctx, point, theorem, &opts),
    }
}

fn dual_point<S: Scalar>(spec: &MapSpec, point: &[S], theorem: Theorem) -> fronts::Result<Vec<S>> {
    let v = match theorem {
        Theorem::A | Theorem::APrime => geometry::normal_map(spec, point, 0)?,
        Theorem::B => geometry::dual_front_jets(&spec.lifted()?.jets(point, 1)?)?,
    };
    let v: Vec<S> = v.iter().map(|j| j.value()).collect();
    HomogeneousPoint::new(v)
        .map(|h| h.coords().to_vec())
        .ok_or(Error::VanishingNormal)
}

fn dual_at<S: Scalar>(ctx: &Ctx, text: &str, theorem: Option<Theorem>, opts: &ClassifyOptions) -> Outcome {
    let point: Vec<S> = tryo!(ctx.point(text));
    let theorem = match theorem.map(Ok).unwrap_or_else(|| classify::default_theorem(&ctx.spec)) {
        Ok(t) => t,
        Err(e) => return ctx.fail(&e),
    };
    let computed = dual_point(&ctx.spec, &point, theorem)
        .and_then(|q| Ok((q, classify::duality_check(&ctx.spec, &point, Some(theorem), opts)?)));
    let (q, r) = match computed {
        Ok(v) => v,
        Err(e) => return ctx.fail(&e),
    };
    let (exit, problems) = pair_exit(&r);
    let result = DualResult {
        theorem,
        dual_point: report::scalars(&q),
        label: r.primary.verdict.label(),
        dual_label: r.dual.verdict.label(),
        pairing: r,
    };
    let mut o = ctx.outcome(Some(report::scalars(&point)), exit, result);
    o.problems = problems;
    o
}

#[derive(Serialize)]
struct TraceResult<'a> {
    curve_count: usize,
    violations: Vec<zeroset::Violation>,
    curves: &'a [zeroset::TracedCurve],
}

fn trace(common: &Common, grid: usize, function: Option<FunctionArg>) -> Outcome {
    let mut settings = Settings {
        tolerances: Some(common.tolerances()),
        grid: Some(grid),
        ..Default::default()
    };
    let path = &common.map;
    // the function default depends on the map kind, so load first
    let mut ctx = tryo!(Ctx::load("trace", path, None, Settings::default()));
    let which = match function {
        Some(FunctionArg::Hessian) => ZeroFunction::Hessian,
        Some(FunctionArg::Lambda) => ZeroFunction::Lambda,
        None if ctx.spec.kind == MapKind::PlaneMap => ZeroFunction::Lambda,
        None => ZeroFunction::Hessian,
    };
    settings.function = Some(match which {
        ZeroFunction::Hessian => "hessian",
        ZeroFunction::Lambda => "lambda",
    });
    ctx.settings = settings;
    let tol = common.tolerances();
    let traced = zeroset::trace_zero_curve(&ctx.spec, which, grid, &tol).and_then(|c| Ok((Grid::new(&ctx.spec, grid)?, c)));
    let (lattice, curves) = match traced {
        Ok(v) => v,
        Err(e) => return ctx.fail(&e),
    };
    let mut violations: Vec<zeroset::Violation> = Vec::new();
    for v in curves.iter().flat_map(|c| &c.vertices).filter(|v| !v.nondegenerate) {
        let p = lattice.wrap(v.point);
        if !violations.iter().any(|w| lattice.distance([w.point[0].0, w.point[1].0], p) < 1e-6) {
            violations.push(zeroset::Violation::new(p, "degenerate-nondiagnosable", "gradient vanishes on the curve"));
        }
    }
    let exit = if violations.is_empty() { EXIT_OK } else { EXIT_VIOLATION };
    let problems = violation_lines(&violations);
    let csv = zeroset::curves_csv(&curves, &lattice);
    let svg = zeroset::curves_svg(&curves, &[], &lattice);
    let result = TraceResult {
        curve_count: curves.len(),
        violations,
        curves: &curves,
    };
    let mut o = ctx.outcome(None, exit, result);
    o.files = vec![("csv", csv), ("svg", svg)];
    o.problems = problems;
    o
}

fn violation_lines(violations: &[zeroset::Violation]) -> Vec<String> {
    violations
        .iter()
        .map(|v| format!("violation at ({:.17e}, {:.17e}): {}: {}", v.point[0].0, v.point[1].0, v.verdict, v.message))
        .collect()
}

fn euler(common: &Common, grid: usize, max_grid: usize) -> Outcome {
    let settings = Settings {
        grid: Some(grid),
        max_grid: Some(max_grid),
        ..classify_settings(common)
    };
    let ctx = tryo!(Ctx::load("euler", &common.map, None, settings));
    let opts = CensusOptions {
        grid,
        max_grid,
        tol: common.tolerances(),
        classify: common.classify_options(),
        ..Default::default()
    };
    let run = zeroset::verify_theorem_c(&ctx.spec, &opts).and_then(|c| Ok((Grid::new(&ctx.spec, c.grid)?, c)));
    let (lattice, census) = match run {
        Ok(v) => v,
        Err(e) => return ctx.fail(&e),
    };
    let mut problems = violation_lines(&census.violations);
    problems.extend(census.warnings.iter().map(|w| format!("warning: {w}")));
    let exit = if !census.hypotheses_hold() {
        EXIT_VIOLATION
    } else if census.residual.is_none() {
        problems.push("nondiagnosable: a godron sign is unresolved".into());
        EXIT_NONDIAGNOSABLE
    } else {
        EXIT_OK
    };
    let csv = zeroset::curves_csv(&census.curves, &lattice);
    let svg = zeroset::curves_svg(&census.curves, &census.godrons, &lattice);
    let mut o = ctx.outcome(None, exit, &census);
    o.files = vec![("csv", csv), ("svg", svg)];
    o.problems = problems;
    o
}

#[derive(Serialize)]
struct CuspResult {
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cusp: Option<CuspReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    osculating: Option<OsculatingCycloid>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generating_radius: Option<Real17>,
    derivatives: CurveDerivatives,
}

fn cusp(path: &std::path::Path, point: &str, window: f64, regular: bool) -> Outcome {
    let settings = Settings {
        window: Some(Real17(window)),
        regular,
        ..Default::default()
    };
    let ctx = tryo!(Ctx::load("cusp", path, Some(point), settings));
    let t: Vec<f64> = tryo!(ctx.point(point));
    let echo = Some(report::scalars(&t));
    let tol = CuspTolerances::default();
    let d = match cusp::detect_cusp(&ctx.spec, t[0], &tol) {
        Ok(d) => d,
        Err(e) => return ctx.fail(&e),
    };
    let base = CuspResult {
        status: "",
        message: None,
        cusp: None,
        osculating: None,
        generating_radius: None,
        derivatives: d,
    };
    if d.is_cusp {
        let computed = cusp::best_cycloid(&ctx.spec, t[0], window, &tol)
            .and_then(|r| Ok((cusp::cusp_svg(&ctx.spec, &r)?, r)));
        let (svg, r) = match computed {
            Ok(v) => v,
            Err(e) => return ctx.fail(&e),
        };
        let mut problems = Vec::new();
        if !r.contact_verified() {
            problems.push(format!(
                "warning: residual did not shrink under window halving ({:.3e} -> {:.3e})",
                r.residual, r.residual_half
            ));
        }
        let result = CuspResult {
            status: "cusp",
            cusp: Some(r),
            ..base
        };
        let mut o = ctx.outcome(echo, EXIT_OK, result);
        o.files = vec![("svg", svg)];
        o.problems = problems;
        return o;
    }
    if regular && !d.singular {
        let (result, exit) = match cusp::osculating_cycloid_regular(&ctx.spec, t[0], &tol) {
            Ok(c) => (
                CuspResult {
                    status: "regular",
                    osculating: Some(c),
                    generating_radius: Some(Real17(c.generating_radius())),
                    ..base
                },
                EXIT_OK,
            ),
            Err(e) => (
                CuspResult {
                    status: "nondiagnosable",
                    message: Some(e.to_string()),
                    ..base
                },
                EXIT_NONDIAGNOSABLE,
            ),
        };
        let mut o = ctx.outcome(echo, exit, result);
        if exit != EXIT_OK {
            o.problems = vec!["nondiagnosable: no osculating cycloid at this point".into()];
        }
        return o;
    }
    let message = if d.singular {
        "singular point that is not a 3/2-cusp (degenerate cusp)"
    } else {
        "regular point; pass --regular for the osculating cycloid"
    };
    let result = CuspResult {
        status: "not-a-cusp",
        message: Some(message.into()),
        ..base
    };
    let mut o = ctx.outcome(echo, EXIT_NONDIAGNOSABLE, result);
    o.problems = vec![format!("nondiagnosable: {message}")];
    o
}
