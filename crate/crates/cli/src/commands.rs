use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use cecl::cascade::{parse_cascade, CascadeModel};
use cecl::config::{apply, parse_config, to_text};
use cecl::eval::{
    build_error_matrix, cross_validate_matrix, default_grid, kfold_split, parse_grid, results_csv, DatasetIndex,
    RegionSpec,
};
use cecl::image::{annotate, load_pgm, outline_rect, save_pgm, PgmFormat};
use cecl::pipeline::{parse_regions_manifest, run, szp_roi, PipelineConfig, RegionInput, RegionsManifest};
use cecl::synth::{write_corpus, Layout, SynthParams};
use cecl::{Exec, GrayImage, Rect};

use crate::options::{
    ConfigArgs, DatasetArgs, DetectArgs, EvaluateArgs, LayoutArg, RegionArgs, SynthArgs, SzpArgs, TuneArgs,
};
use crate::{input, usage, Outcome};

fn read(path: &Path) -> Outcome<Vec<u8>> {
    fs::read(path).with_context(|| format!("cannot read {}", path.display())).map_err(input)
}

fn read_text(path: &Path) -> Outcome<String> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(input)
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Outcome {
    fs::write(path, bytes)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(input)
}

fn load_image(path: &Path) -> Outcome<GrayImage> {
    load_pgm(&read(path)?)
        .with_context(|| format!("cannot decode {}", path.display()))
        .map_err(input)
}

fn load_model(path: &Path) -> Outcome<CascadeModel> {
    parse_cascade(&read_text(path)?)
        .with_context(|| format!("cannot load cascade {}", path.display()))
        .map_err(input)
}

fn load_manifest(path: &Path) -> Outcome<RegionsManifest> {
    parse_regions_manifest(&read_text(path)?)
        .with_context(|| format!("cannot load regions {}", path.display()))
        .map_err(input)
}

/// Defaults, then the config file, then `--set`, then the dedicated flags.
fn effective_config(args: &ConfigArgs) -> Outcome<PipelineConfig> {
    let mut cfg = match &args.config {
        Some(path) => parse_config(&read_text(path)?, PipelineConfig::default())
            .with_context(|| format!("in {}", path.display()))
            .map_err(usage)?,
        None => PipelineConfig::default(),
    };
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| usage(anyhow!("--set expects KEY=VALUE, got `{kv}`")))?;
        apply(&mut cfg, k, v).map_err(usage)?;
    }
    if let Some(t_b) = args.t_b {
        cfg.t_b = t_b;
    }
    if let Some(t_e) = args.t_e {
        cfg.t_e = t_e;
    }
    if let Some(v) = args.r_min_frac {
        cfg.hough.r_min_frac = v;
    }
    if let Some(v) = args.r_max_frac {
        cfg.hough.r_max_frac = v;
    }
    if let Some(v) = args.min_completeness {
        cfg.hough.min_completeness = v;
    }
    cfg.validate().map_err(usage)?;
    Ok(cfg)
}

fn exec(args: &ConfigArgs) -> Exec {
    if args.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    }
}

/// Region source from the flags, or `fallback` (if it exists) when none
/// were given.
fn region_spec(args: &RegionArgs, fallback: Option<&Path>) -> Outcome<RegionSpec> {
    match (&args.face_model, &args.eye_model, &args.regions) {
        (Some(face), Some(eye), None) => Ok(RegionSpec::Cascades {
            face: load_model(face)?,
            eye: load_model(eye)?,
        }),
        (None, None, Some(path)) => Ok(RegionSpec::Manifest(load_manifest(path)?)),
        (None, None, None) => match fallback.filter(|p| p.is_file()) {
            Some(path) => Ok(RegionSpec::Manifest(load_manifest(path)?)),
            None => Err(usage(anyhow!(
                "no eye-region source: pass --face-model and --eye-model, or --regions"
            ))),
        },
        _ => Err(usage(anyhow!("pass either --face-model with --eye-model, or --regions"))),
    }
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Manifest entry for `image`, by file name; a single-entry manifest
/// applies to any image.
fn manifest_entry(m: &RegionsManifest, image: &Path) -> Outcome<(Rect, Rect)> {
    let name = file_name(image);
    if let Some(&pair) = m.get(&name) {
        return Ok(pair);
    }
    match m.values().collect::<Vec<_>>().as_slice() {
        [&pair] => Ok(pair),
        _ => Err(input(anyhow!("no regions listed for `{name}`"))),
    }
}

pub fn detect(args: DetectArgs) -> Outcome {
    let cfg = effective_config(&args.config)?;
    let spec = region_spec(&args.regions, None)?;
    let frame = load_image(&args.image)?;
    let region_input = match &spec {
        RegionSpec::Cascades { face, eye } => RegionInput::Cascades { face, eye },
        RegionSpec::Manifest(m) => {
            let (a, b) = manifest_entry(m, &args.image)?;
            RegionInput::Provided(a, b)
        }
    };
    let res = run(&frame, region_input, &cfg).map_err(input)?;
    let (l, r) = (&res.left, &res.right);
    println!(
        "{} {} {} {} {} {}",
        l.center.x, l.center.y, r.center.x, r.center.y, l.method, r.method
    );
    if let Some(out) = &args.annotate {
        let circles: Vec<_> = [l, r].iter().filter_map(|e| e.frame_circle()).collect();
        let img = annotate(&frame, &circles, &[l.center, r.center]);
        write(out, save_pgm(&img, PgmFormat::P5))?;
    }
    if let Some(out) = &args.csv {
        let row = format!(
            "filename,lx,ly,rx,ry,method_l,method_r\n{},{},{},{},{},{},{}\n",
            file_name(&args.image),
            l.center.x,
            l.center.y,
            r.center.x,
            r.center.y,
            l.method,
            r.method
        );
        write(out, row)?;
    }
    Ok(())
}

struct Loaded {
    dataset: DatasetIndex,
    spec: RegionSpec,
    cfg: PipelineConfig,
    grid: Vec<u8>,
    exec: Exec,
}

fn load_dataset(args: &DatasetArgs) -> Outcome<Loaded> {
    let cfg = effective_config(&args.config)?;
    let grid = match &args.grid {
        Some(g) => parse_grid(g).map_err(usage)?,
        None => default_grid(),
    };
    let dataset = DatasetIndex::scan(&args.dataset).map_err(input)?;
    if dataset.is_empty() {
        return Err(input(anyhow!("no annotated frames in {}", args.dataset.display())));
    }
    let spec = region_spec(&args.regions, Some(&args.dataset.join("regions.txt")))?;
    Ok(Loaded {
        dataset,
        spec,
        cfg,
        grid,
        exec: exec(&args.config),
    })
}

fn grid_text(grid: &[u8]) -> String {
    grid.iter().map(u8::to_string).collect::<Vec<_>>().join(",")
}

pub fn evaluate(args: EvaluateArgs) -> Outcome {
    let d = load_dataset(&args.data)?;
    let split = kfold_split(d.dataset.len(), args.folds, args.seed).map_err(usage)?;
    let m = build_error_matrix(&d.dataset, &d.spec, &d.cfg, &d.grid, d.exec).map_err(input)?;
    let mut cv = cross_validate_matrix(&m, split);

    let mut echo = to_text(&d.cfg);
    let _ = writeln!(echo, "seed = {}", args.seed);
    let _ = writeln!(echo, "folds = {}", args.folds);
    let _ = writeln!(echo, "grid = {}", grid_text(&m.grid));
    let _ = writeln!(echo, "fold_t_b = {}", grid_text(&cv.fold_t_b));
    cv.report.config = echo;

    if let Some(path) = &args.report {
        write(path, cv.report.to_table())?;
    }
    if let Some(path) = &args.report_csv {
        write(path, cv.report.to_csv())?;
    }
    let results = args.results.clone().or_else(|| {
        args.report.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".images.csv");
            PathBuf::from(s)
        })
    });
    if let Some(path) = &results {
        write(path, results_csv(&cv.outcomes))?;
    }
    let fractions: Vec<String> = cv.report.fractions.iter().map(|f| format!("{f:.6}")).collect();
    println!("{}", fractions.join(" "));
    Ok(())
}

pub fn tune(args: TuneArgs) -> Outcome {
    let d = load_dataset(&args.data)?;
    let m = build_error_matrix(&d.dataset, &d.spec, &d.cfg, &d.grid, d.exec).map_err(input)?;
    let tuned = m.tune(&(0..m.len()).collect::<Vec<_>>());
    println!(
        "t_b = {} accuracy_05 = {:.6} accuracy_10 = {:.6}",
        tuned.t_b,
        tuned.accuracy_05(),
        tuned.accuracy_10()
    );
    if let Some(out) = &args.out {
        let cfg = PipelineConfig { t_b: tuned.t_b, ..d.cfg };
        write(out, to_text(&cfg))?;
    }
    Ok(())
}

pub fn synth(args: SynthArgs) -> Outcome {
    let params = SynthParams {
        noise: args.noise,
        occlusion: args.occlusion,
        eyebrow: !args.no_eyebrow,
        hair: args.hair,
        layout: match args.layout {
            LayoutArg::Standard => Layout::Standard,
            LayoutArg::Decoy => Layout::Decoy,
        },
    };
    params.validate().map_err(usage)?;
    let manifest = write_corpus(&args.out, args.count, args.seed, &params).map_err(input)?;
    println!("{} frames written to {}", manifest.len(), args.out.display());
    Ok(())
}

pub fn szp(args: SzpArgs) -> Outcome {
    let path = args
        .regions
        .as_ref()
        .ok_or_else(|| usage(anyhow!("szp needs --regions")))?;
    if !path.is_file() {
        return Err(usage(anyhow!("regions file {} does not exist", path.display())));
    }
    let manifest = load_manifest(path)?;
    let frame = load_image(&args.image)?;
    let (a, b) = manifest_entry(&manifest, &args.image)?;
    let (l, r) = if b.center().0 < a.center().0 { (b, a) } else { (a, b) };
    let mut rois = Vec::new();
    for region in [l, r] {
        let patch = frame.crop(&region).map_err(input)?;
        let roi = region.compose(&szp_roi(&patch));
        println!("{} {} {} {}", roi.x, roi.y, roi.w, roi.h);
        rois.push(roi);
    }
    if let Some(out) = &args.annotate {
        let mut img = frame.clone();
        for roi in &rois {
            outline_rect(&mut img, roi);
        }
        write(out, save_pgm(&img, PgmFormat::P5))?;
    }
    Ok(())
}
