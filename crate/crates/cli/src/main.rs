//! `shearlet` command-line tool. Exit codes: 0 success, 1 usage error,
//! 2 data error.

mod args;

use std::fmt::Write as _;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use ndarray::ArrayD;
use shearlet::apps::{
    add_gaussian_noise, denoise, inpaint, psnr, quality_q_opt, random_mask, separate, GaussianBlur,
    InpaintConfig, SeparationConfig, ThresholdScaling, ThresholdSchedule, DEFAULT_K_2D,
    DEFAULT_K_3D,
};
use shearlet::io::{read_signal, write_signal, Image, Loaded};
use shearlet::transform::{deserialize_for, serialize};
use shearlet::{
    alpha_to_shear_levels, build_system_2d, build_system_3d, forward, inverse, ScaleProfile,
    ShearletSystem, SystemConfig, SystemDescriptor, WedgeScaling,
};

use args::{Cli, Command, ProfileArgs};

enum Failure {
    Usage(String),
    Data(String),
}

type Outcome<T> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn data(e: shearlet::Error) -> Failure {
    Failure::Data(e.to_string())
}

fn parse_list<T: std::str::FromStr>(flag: &str, s: &str) -> Outcome<Vec<T>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| usage(format!("--{flag}: cannot parse '{t}'")))
        })
        .collect()
}

fn parse_size(s: &str) -> Outcome<Vec<usize>> {
    let dims: Vec<usize> = s
        .split('x')
        .map(|t| {
            t.parse()
                .map_err(|_| usage(format!("--size: cannot parse '{s}'")))
        })
        .collect::<Outcome<_>>()?;
    if !(2..=3).contains(&dims.len()) {
        return Err(usage("--size needs two or three extents, e.g. 512x512"));
    }
    check_extents(&dims)?;
    Ok(dims)
}

fn check_extents(dims: &[usize]) -> Outcome<()> {
    if dims.iter().any(|&d| d < shearlet::system::MIN_EXTENT) {
        return Err(usage(format!(
            "grid {dims:?} too small: every extent must be at least {}",
            shearlet::system::MIN_EXTENT
        )));
    }
    Ok(())
}

/// Profile flags checked without touching any file. Shear levels stay
/// `None` until the dimensionality picks a default.
struct ProfilePlan {
    levels: Option<Vec<u32>>,
    scales: Option<usize>,
    j0: u32,
    full_system: bool,
    wedge: WedgeScaling,
    descriptor: Option<std::path::PathBuf>,
}

impl ProfilePlan {
    fn new(p: &ProfileArgs) -> Outcome<Self> {
        let wedge = WedgeScaling::parse(&p.wedge).map_err(|e| usage(e.to_string()))?;
        let levels = match (&p.shear_levels, &p.alpha) {
            (Some(s), _) => Some(parse_list::<u32>("shear-levels", s)?),
            (None, Some(a)) => Some(
                alpha_to_shear_levels(&parse_list::<f64>("alpha", a)?, p.j0)
                    .map_err(|e| usage(e.to_string()))?,
            ),
            (None, None) => p.scales.map(|n| {
                alpha_to_shear_levels(&vec![1.0; n], p.j0).expect("parabolic alpha is valid")
            }),
        };
        if let (Some(l), Some(n)) = (&levels, p.scales) {
            if l.len() != n {
                return Err(usage(format!(
                    "--scales {n} but {} shear levels given",
                    l.len()
                )));
            }
        }
        if let Some(l) = &levels {
            if l.is_empty() {
                return Err(usage("at least one scale is required"));
            }
            if l.iter().any(|&d| d > 6) {
                return Err(usage("shear levels above 6 are not supported"));
            }
        }
        Ok(ProfilePlan {
            levels,
            scales: p.scales,
            j0: p.j0,
            full_system: p.full_system,
            wedge,
            descriptor: p.descriptor.clone(),
        })
    }

    fn n_scales(&self, ndim: usize) -> usize {
        self.scales.unwrap_or_else(|| self.levels_for(ndim).len())
    }

    fn levels_for(&self, ndim: usize) -> Vec<u32> {
        self.levels.clone().unwrap_or_else(|| {
            if ndim == 2 {
                ScaleProfile::sl2d_2().shear_levels
            } else {
                ScaleProfile::sl3d_1().shear_levels
            }
        })
    }

    fn build(&self, dims: &[usize]) -> Outcome<ShearletSystem> {
        if let Some(path) = &self.descriptor {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
            let desc = SystemDescriptor::parse(&text)
                .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
            if desc.dims != dims {
                return Err(Failure::Data(format!(
                    "{}: descriptor is for {:?}, signal is {:?}",
                    path.display(),
                    desc.dims,
                    dims
                )));
            }
            return desc.build(None).map_err(data);
        }
        let cfg = SystemConfig {
            full_system: self.full_system,
            wedge: self.wedge,
            ..SystemConfig::new(ScaleProfile::new(self.levels_for(dims.len()), self.j0))
                .map_err(data)?
        };
        match dims {
            [a, b] => build_system_2d([*a, *b], &cfg),
            [a, b, c] => build_system_3d([*a, *b, *c], &cfg),
            _ => unreachable!("dimensionality checked"),
        }
        .map_err(data)
    }
}

fn load(path: &Path) -> Outcome<Loaded> {
    let loaded = read_signal(path).map_err(|e| match e {
        shearlet::Error::Io { .. } => data(e),
        other => Failure::Data(format!("{}: {other}", path.display())),
    })?;
    check_extents(loaded_dims(&loaded).as_slice()).map_err(|f| match f {
        Failure::Usage(m) | Failure::Data(m) => Failure::Data(format!("{}: {m}", path.display())),
    })?;
    Ok(loaded)
}

fn loaded_dims(l: &Loaded) -> Vec<usize> {
    match l {
        Loaded::Image(img) => img.data.shape().to_vec(),
        Loaded::Volume(v) => v.shape().to_vec(),
    }
}

fn save(path: &Path, signal: &ArrayD<f64>, like: &Loaded) -> Outcome<()> {
    write_signal(path, signal, like).map_err(data)
}

fn scaling(strict: bool) -> ThresholdScaling {
    if strict {
        ThresholdScaling::Uniform
    } else {
        ThresholdScaling::FilterNorm
    }
}

fn check_iterations(iterations: usize, delta_min: f64) -> Outcome<()> {
    if iterations < 2 {
        return Err(usage("--iterations must be at least 2"));
    }
    if !(delta_min > 0.0 && delta_min < 1.0) {
        return Err(usage("--delta-min must lie in (0, 1)"));
    }
    Ok(())
}

/// Machine-readable `key=value` line followed by human text.
struct Report {
    line: String,
    text: String,
}

impl Report {
    fn new(command: &str) -> Self {
        Report {
            line: format!("command={command}"),
            text: String::new(),
        }
    }

    fn kv(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        write!(self.line, " {key}={value}").unwrap();
        self
    }

    fn say(&mut self, msg: impl AsRef<str>) -> &mut Self {
        self.text.push_str(msg.as_ref());
        self.text.push('\n');
        self
    }

    /// A closed stdout (e.g. piped into `head`) is not an error.
    fn print(&self) {
        use std::io::Write;
        let mut out = std::io::stdout().lock();
        let _ = writeln!(out, "{}", self.line).and_then(|_| write!(out, "{}", self.text));
    }
}

fn fmt_dims(d: &[usize]) -> String {
    d.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("x")
}

fn run(cli: Cli) -> Outcome<Report> {
    match cli.command {
        Command::System { size, profile, out } => {
            let dims = parse_size(&size)?;
            let plan = ProfilePlan::new(&profile)?;
            let t = Instant::now();
            let sys = plan.build(&dims)?;
            let desc = SystemDescriptor::of(&sys).map_err(data)?;
            std::fs::write(&out, desc.to_text())
                .map_err(|e| Failure::Data(format!("{}: {e}", out.display())))?;
            let (a, b) = sys.frame_bounds();
            let mut r = Report::new("system");
            r.kv("dims", fmt_dims(&dims))
                .kv("filters", sys.len())
                .kv("A", a)
                .kv("B", b)
                .kv("time_s", format!("{:.3}", t.elapsed().as_secs_f64()))
                .say(format!(
                    "{} filters on {}; descriptor written to {}",
                    sys.len(),
                    fmt_dims(&dims),
                    out.display()
                ));
            Ok(r)
        }
        Command::FrameBounds { size, profile } => {
            let dims = parse_size(&size)?;
            let plan = ProfilePlan::new(&profile)?;
            let t = Instant::now();
            let sys = plan.build(&dims)?;
            let (a, b) = sys.frame_bounds();
            let mut r = Report::new("frame-bounds");
            r.kv("dims", fmt_dims(&dims))
                .kv("filters", sys.len())
                .kv("A", a)
                .kv("B", b)
                .kv("B_over_A", b / a)
                .kv("time_s", format!("{:.3}", t.elapsed().as_secs_f64()))
                .say(format!(
                    "lower bound A = {a:.6}, upper bound B = {b:.6}, ratio {:.4}",
                    b / a
                ));
            Ok(r)
        }
        Command::Decompose {
            input,
            out,
            descriptor_out,
            profile,
        } => {
            let plan = ProfilePlan::new(&profile)?;
            let loaded = load(&input)?;
            let signal = loaded.signal();
            let t = Instant::now();
            let sys = plan.build(signal.shape())?;
            let coeffs = forward(&signal, &sys).map_err(data)?;
            let file = std::fs::File::create(&out)
                .map_err(|e| Failure::Data(format!("{}: {e}", out.display())))?;
            serialize(&coeffs, std::io::BufWriter::new(file))
                .map_err(|e| Failure::Data(format!("{}: {e}", out.display())))?;
            if let Some(p) = descriptor_out {
                let text = SystemDescriptor::of(&sys).map_err(data)?.to_text();
                std::fs::write(&p, text)
                    .map_err(|e| Failure::Data(format!("{}: {e}", p.display())))?;
            }
            let mut r = Report::new("decompose");
            r.kv("dims", fmt_dims(signal.shape()))
                .kv("bands", coeffs.len())
                .kv("time_s", format!("{:.3}", t.elapsed().as_secs_f64()))
                .say(format!(
                    "{} bands written to {}",
                    coeffs.len(),
                    out.display()
                ));
            Ok(r)
        }
        Command::Reconstruct {
            input,
            out,
            reference,
            maxval,
            profile,
        } => {
            let plan = ProfilePlan::new(&profile)?;
            if maxval == 0 {
                return Err(usage("--maxval must be positive"));
            }
            let bytes = std::fs::read(&input)
                .map_err(|e| Failure::Data(format!("{}: {e}", input.display())))?;
            let header = shearlet::transform::deserialize(&bytes[..])
                .map_err(|e| Failure::Data(format!("{}: {e}", input.display())))?;
            let t = Instant::now();
            let sys = plan.build(&header.shape)?;
            let coeffs = deserialize_for(&bytes[..], &sys)
                .map_err(|e| Failure::Data(format!("{}: {e}", input.display())))?;
            let signal = inverse(&coeffs, &sys).map_err(data)?;
            let like = if signal.ndim() == 2 {
                Loaded::Image(Image {
                    data: ndarray::Array2::zeros((0, 0)),
                    maxval,
                })
            } else {
                Loaded::Volume(ndarray::Array3::zeros((0, 0, 0)))
            };
            save(&out, &signal, &like)?;
            let mut r = Report::new("reconstruct");
            r.kv("dims", fmt_dims(signal.shape()));
            if let Some(p) = reference {
                let orig = load(&p)?.signal();
                if orig.shape() != signal.shape() {
                    return Err(Failure::Data(format!(
                        "{}: shape {:?} differs",
                        p.display(),
                        orig.shape()
                    )));
                }
                let diff = orig
                    .iter()
                    .zip(signal.iter())
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                r.kv("max_abs_diff", format!("{diff:e}"))
                    .say(format!("maximum deviation from {}: {diff:e}", p.display()));
            }
            r.kv("time_s", format!("{:.3}", t.elapsed().as_secs_f64()))
                .say(format!("reconstruction written to {}", out.display()));
            Ok(r)
        }
        Command::Denoise {
            input,
            out,
            sigma,
            k,
            seed,
            noisy_input,
            noisy_out,
            reference,
            strict_threshold,
            profile,
        } => {
            let plan = ProfilePlan::new(&profile)?;
            if !(sigma >= 0.0 && sigma.is_finite()) {
                return Err(usage("--sigma must be a nonnegative number"));
            }
            let factors = match &k {
                Some(s) => Some(parse_list::<f64>("K", s)?),
                None => None,
            };
            if let (Some(f), Some(l)) = (&factors, &plan.levels) {
                if f.len() != l.len() {
                    return Err(usage(format!(
                        "--K has {} entries for {} scales",
                        f.len(),
                        l.len()
                    )));
                }
            }
            let loaded = load(&input)?;
            let clean = loaded.signal();
            let ndim = clean.ndim();
            let n_scales = plan.n_scales(ndim);
            let factors = match factors {
                Some(f) if f.len() == n_scales => f,
                Some(f) => {
                    return Err(usage(format!(
                        "--K has {} entries for {n_scales} scales",
                        f.len()
                    )))
                }
                None if ndim == 2 && n_scales == 4 => DEFAULT_K_2D.to_vec(),
                None if ndim == 3 && n_scales == 3 => DEFAULT_K_3D.to_vec(),
                None => {
                    return Err(usage(format!(
                        "--K is required for {n_scales} scales in {ndim}D"
                    )))
                }
            };
            let mut schedule =
                ThresholdSchedule::new(factors, sigma).map_err(|e| usage(e.to_string()))?;
            schedule.scaling = scaling(strict_threshold);
            let reference = match reference {
                Some(p) => Some(load(&p)?.signal()),
                None if !noisy_input => Some(clean.clone()),
                None => None,
            };
            let t = Instant::now();
            let noisy = if noisy_input {
                clean
            } else {
                add_gaussian_noise(&clean, sigma, seed)
            };
            let sys = plan.build(noisy.shape())?;
            let result = denoise(&noisy, &sys, &schedule).map_err(data)?;
            let elapsed = t.elapsed().as_secs_f64();
            save(&out, &result, &loaded)?;
            if let Some(p) = noisy_out {
                save(&p, &noisy, &loaded)?;
            }
            let mut r = Report::new("denoise");
            r.kv("sigma", sigma).kv("seed", seed);
            if let Some(f) = &reference {
                let (pn, pd) = (
                    psnr(f, &noisy).map_err(data)?,
                    psnr(f, &result).map_err(data)?,
                );
                r.kv("psnr_noisy", format!("{pn:.4}"))
                    .kv("psnr_denoised", format!("{pd:.4}"))
                    .say(format!("PSNR {pn:.2} dB noisy, {pd:.2} dB denoised"));
            }
            r.kv("time_s", format!("{elapsed:.3}"))
                .say(format!("denoised signal written to {}", out.display()));
            Ok(r)
        }
        Command::Inpaint {
            input,
            out,
            mask,
            missing,
            seed,
            iterations,
            delta_min,
            masked_out,
            strict_threshold,
            profile,
        } => {
            let plan = ProfilePlan::new(&profile)?;
            check_iterations(iterations, delta_min)?;
            if !(0.0..1.0).contains(&missing) {
                return Err(usage("--missing must lie in [0, 1)"));
            }
            let loaded = load(&input)?;
            let clean = loaded.signal();
            let mask = match mask {
                Some(p) => {
                    let m = load(&p)?.signal();
                    if m.shape() != clean.shape() {
                        return Err(Failure::Data(format!(
                            "{}: mask shape {:?} differs from {:?}",
                            p.display(),
                            m.shape(),
                            clean.shape()
                        )));
                    }
                    m.mapv(|v| if v != 0.0 { 1.0 } else { 0.0 })
                }
                None => random_mask(clean.shape(), missing, seed),
            };
            let masked = &clean * &mask;
            let cfg = InpaintConfig {
                scaling: scaling(strict_threshold),
                ..InpaintConfig::new(iterations, delta_min)
            };
            let t = Instant::now();
            let sys = plan.build(clean.shape())?;
            let result = inpaint(&masked, &mask, &sys, &cfg).map_err(data)?;
            let elapsed = t.elapsed().as_secs_f64();
            save(&out, &result, &loaded)?;
            if let Some(p) = masked_out {
                save(&p, &masked, &loaded)?;
            }
            let (pm, pi) = (
                psnr(&clean, &masked).map_err(data)?,
                psnr(&clean, &result).map_err(data)?,
            );
            let observed = mask.sum() / mask.len() as f64;
            let mut r = Report::new("inpaint");
            r.kv("observed", format!("{observed:.4}"))
                .kv("psnr_masked", format!("{pm:.4}"))
                .kv("psnr_inpainted", format!("{pi:.4}"))
                .kv("time_s", format!("{elapsed:.3}"))
                .say(format!(
                    "{:.1}% observed; PSNR {pm:.2} dB zero-filled, {pi:.2} dB inpainted",
                    100.0 * observed
                ))
                .say(format!("result written to {}", out.display()));
            Ok(r)
        }
        Command::Separate {
            input,
            out_curves,
            out_points,
            iterations,
            delta_min,
            truth_curves,
            truth_points,
            strict_threshold,
            profile,
        } => {
            let plan = ProfilePlan::new(&profile)?;
            check_iterations(iterations, delta_min)?;
            let loaded = load(&input)?;
            if !matches!(loaded, Loaded::Image(_)) {
                return Err(Failure::Data(format!(
                    "{}: separation needs a 2D image",
                    input.display()
                )));
            }
            let f = loaded.signal();
            let truths = [truth_curves, truth_points]
                .into_iter()
                .map(|p| {
                    p.map(|p| {
                        load(&p).map(|l| l.signal().mapv(|v| if v != 0.0 { 1.0 } else { 0.0 }))
                    })
                    .transpose()
                })
                .collect::<Outcome<Vec<_>>>()?;
            let t = Instant::now();
            let dir = plan.build(f.shape())?;
            let shape: [usize; 2] = [f.shape()[0], f.shape()[1]];
            let iso =
                build_system_2d(shape, &SystemConfig::isotropic(dir.n_scales())).map_err(data)?;
            let cfg = SeparationConfig {
                scaling: scaling(strict_threshold),
                ..SeparationConfig::new(iterations, delta_min)
            };
            let res = separate(&f, &dir, &iso, &cfg).map_err(data)?;
            let elapsed = t.elapsed().as_secs_f64();
            save(&out_curves, &res.curvilinear, &loaded)?;
            save(&out_points, &res.blobs, &loaded)?;
            let mut r = Report::new("separate");
            let blur = GaussianBlur::default();
            for ((name, est), truth) in [("curves", &res.curvilinear), ("points", &res.blobs)]
                .into_iter()
                .zip(&truths)
            {
                if let Some(truth) = truth {
                    let (q, delta) = quality_q_opt(est, truth, &blur).map_err(data)?;
                    r.kv(&format!("q_opt_{name}"), format!("{q:.4}"))
                        .kv(&format!("delta_{name}"), delta)
                        .say(format!(
                            "Q_opt({name}) = {q:.4} at binarization level {delta}"
                        ));
                }
            }
            r.kv("time_s", format!("{elapsed:.3}")).say(format!(
                "curvilinear part written to {}, point part to {}",
                out_curves.display(),
                out_points.display()
            ));
            Ok(r)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli) {
        Ok(report) => {
            report.print();
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            eprintln!("run with --help for usage");
            ExitCode::from(1)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
