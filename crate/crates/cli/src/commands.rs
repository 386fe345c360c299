use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use netpulse_core::data::{self, DataError, BUILTIN_NAMES};
use netpulse_core::nn::{NetworkConfig, TaskKind};
use netpulse_core::session::{config_for_dataset, ModelState, Prediction};
use netpulse_core::trace::{read_trace, replay_trace, serialize_event, validate_trace, ReplayInput};
use netpulse_core::{Command, Dataset, EventKind, Metrics, Session, SessionStatus};
use serde::Serialize;

use crate::args::{ConfigFlags, InspectArgs, PredictArgs, TrainArgs, ValidateArgs};
use crate::error::{CliError, Result};

/// A CSV path if one exists, otherwise a built-in dataset name.
pub fn load_dataset(source: &str, target: Option<&str>) -> Result<Dataset> {
    let path = Path::new(source);
    if path.is_file() {
        let bytes = fs::read(path).map_err(|e| CliError::Data(format!("cannot read {source}: {e}")))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| source.to_owned());
        return Dataset::from_csv(&name, &bytes, target).map_err(|e| CliError::Data(format!("{source}: {e}")));
    }
    let dataset = data::builtin(source).ok_or_else(|| {
        CliError::Data(format!(
            "no file or built-in dataset named `{source}` (built-ins: {})",
            BUILTIN_NAMES.join(", ")
        ))
    })?;
    if let Some(t) = target {
        if t != dataset.schema.target_name {
            return Err(CliError::Config(format!(
                "built-in dataset {source} has the fixed target `{}`",
                dataset.schema.target_name
            )));
        }
    }
    Ok(dataset)
}

/// Split `dataset` and derive the network configuration from the flags.
pub fn prepare(dataset: &Dataset, flags: &ConfigFlags) -> Result<(Dataset, NetworkConfig)> {
    let mut config = config_for_dataset(
        dataset,
        &flags.layers.0,
        flags.activation,
        flags.lr,
        flags.epochs,
        flags.seed,
    );
    if let Some(task) = flags.task {
        config.task = task;
    }
    let split = dataset.split(flags.val_fraction, flags.seed).map_err(|e| match e {
        DataError::BadFraction(_) | DataError::EmptyTraining => CliError::Config(format!("--val-fraction: {e}")),
        other => CliError::Data(other.to_string()),
    })?;
    Ok((split, config))
}

/// Validated, Idle session for the run described by `dataset` and `flags`.
pub fn build_session(dataset: &str, flags: &ConfigFlags) -> Result<Session> {
    let data = load_dataset(dataset, flags.target.as_deref())?;
    let (split, config) = prepare(&data, flags)?;
    Ok(Session::create(Arc::new(split), config)?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", path.display())))
}

fn write_failed(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Data(format!("cannot write {}: {e}", path.display()))
}

/// One row of the metrics table; absent values are empty cells.
#[derive(Debug, Serialize)]
pub struct MetricsRow {
    pub epoch: u32,
    pub loss: f64,
    pub accuracy: Option<f64>,
    pub val_loss: Option<f64>,
    pub val_accuracy: Option<f64>,
}

impl MetricsRow {
    fn new(epoch: u32, m: &Metrics) -> Self {
        Self {
            epoch,
            loss: m.loss,
            accuracy: m.accuracy,
            val_loss: m.val_loss,
            val_accuracy: m.val_accuracy,
        }
    }
}

pub fn train(args: &TrainArgs, out: &mut dyn Write) -> Result<()> {
    let mut session = build_session(&args.dataset, &args.config)?;
    let mut trace = args.out_trace.as_deref().map(create).transpose()?;
    let mut metrics = match &args.out_metrics {
        Some(path) => Some(
            csv::Writer::from_path(path)
                .map_err(|e| CliError::Data(format!("cannot create {}: {e}", path.display())))?,
        ),
        None => None,
    };

    session.control(Command::Play)?;
    let mut events = 0u64;
    let mut last = None;
    while session.status() == SessionStatus::Running {
        let event = session.advance()?;
        events += 1;
        if let (Some(w), Some(path)) = (trace.as_mut(), args.out_trace.as_deref()) {
            writeln!(w, "{}", serialize_event(&event)).map_err(write_failed(path))?;
        }
        if let EventKind::EpochEnd { metrics: m } = &event.kind {
            if let (Some(w), Some(path)) = (metrics.as_mut(), args.out_metrics.as_deref()) {
                w.serialize(MetricsRow::new(event.epoch, m))
                    .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
            }
            last = Some(MetricsRow::new(event.epoch, m));
        }
    }
    if let (Some(mut w), Some(path)) = (trace, args.out_trace.as_deref()) {
        w.flush().map_err(write_failed(path))?;
    }
    if let (Some(mut w), Some(path)) = (metrics, args.out_metrics.as_deref()) {
        w.flush().map_err(write_failed(path))?;
    }
    if let Some(path) = &args.out_model {
        let json = serde_json::to_string_pretty(&session.model_state()).expect("model state serializes");
        fs::write(path, json + "\n").map_err(write_failed(path))?;
    }

    let _ = writeln!(out, "dataset: {}", session.dataset().name);
    let _ = writeln!(out, "layers: {:?}", session.config().layer_sizes);
    let _ = writeln!(out, "epochs: {}", session.current_epoch());
    let _ = writeln!(out, "events: {events}");
    if let Some(row) = last {
        let _ = writeln!(out, "loss: {}", row.loss);
        if let Some(a) = row.accuracy {
            let _ = writeln!(out, "accuracy: {a}");
        }
        if let Some(v) = row.val_loss {
            let _ = writeln!(out, "val_loss: {v}");
        }
        if let Some(v) = row.val_accuracy {
            let _ = writeln!(out, "val_accuracy: {v}");
        }
    }
    Ok(())
}

pub fn validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<()> {
    let path = &args.trace;
    let bytes = fs::read(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    if !bytes.is_empty() && !bytes.ends_with(b"\n") {
        let line = bytes.iter().filter(|&&b| b == b'\n').count() + 1;
        return Err(CliError::Data(format!("line {line}: truncated (no line terminator)")));
    }
    let events = read_trace(&bytes[..]).map_err(|e| CliError::Data(e.to_string()))?;
    if events.is_empty() {
        return Err(CliError::Data(format!("{} holds no events", path.display())));
    }
    validate_trace(&events)?;
    let replayed = match &args.dataset {
        Some(dataset) => {
            let data = load_dataset(dataset, args.config.target.as_deref())?;
            let (split, config) = prepare(&data, &args.config)?;
            config.validate().map_err(|e| CliError::Config(e.to_string()))?;
            let val = (!split.val.is_empty()).then(|| split.val.batch());
            replay_trace(
                &events,
                ReplayInput {
                    config: &config,
                    train: split.train.batch(),
                    val,
                },
            )?;
            true
        }
        None => false,
    };
    let epochs = events.last().map_or(0, |e| e.epoch + 1);
    let _ = writeln!(out, "ok: {} events, {epochs} epochs", events.len());
    let _ = writeln!(
        out,
        "replay: {}",
        if replayed { "matched" } else { "skipped (no --dataset)" }
    );
    Ok(())
}

pub fn inspect(args: &InspectArgs, out: &mut dyn Write) -> Result<()> {
    let dataset = load_dataset(&args.dataset, args.target.as_deref())?;
    let s = dataset.summarize();
    let _ = writeln!(out, "name: {}", s.name);
    let _ = writeln!(out, "samples: {}", s.samples);
    let _ = writeln!(out, "features: {} ({})", s.feature_names.len(), s.feature_names.join(", "));
    let _ = writeln!(out, "target: {}", s.target_name);
    let _ = writeln!(
        out,
        "task: {}",
        match s.task {
            TaskKind::Classification => "classification",
            TaskKind::Regression => "regression",
        }
    );
    if s.task == TaskKind::Classification {
        let _ = writeln!(out, "classes: {} ({})", s.class_labels.len(), s.class_labels.join(", "));
    }
    Ok(())
}

pub fn parse_inputs(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("--inputs: `{}` is not a number", v.trim())))
        })
        .collect()
}

pub fn load_model(path: &Path) -> Result<ModelState> {
    let bytes = fs::read(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    let model: ModelState = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Data(format!("{} is not a saved model: {e}", path.display())))?;
    model
        .check()
        .map_err(|e| CliError::Data(format!("{} is inconsistent: {e}", path.display())))?;
    Ok(model)
}

pub fn predict(args: &PredictArgs, out: &mut dyn Write) -> Result<()> {
    let inputs = parse_inputs(&args.inputs)?;
    let model = match (&args.model, &args.dataset) {
        (Some(path), _) => load_model(path)?,
        (None, Some(dataset)) => {
            let mut session = build_session(dataset, &args.config)?;
            if !args.untrained {
                session.control(Command::Play)?;
                session.run_to_end()?;
            }
            session.model_state()
        }
        (None, None) => return Err(CliError::Config("give --model or --dataset".into())),
    };
    let prediction = model.predict(&inputs)?;
    print_prediction(&model, &prediction, args.json, out);
    Ok(())
}

fn print_prediction(model: &ModelState, p: &Prediction, json: bool, out: &mut dyn Write) {
    if json {
        let _ = writeln!(out, "{}", serde_json::to_string(p).expect("prediction serializes"));
        return;
    }
    match p.task {
        TaskKind::Classification => {
            if let Some(label) = &p.label {
                let _ = writeln!(out, "label: {label}");
            }
            for (i, prob) in p.outputs.iter().enumerate() {
                let name = model.schema.class_labels.get(i).cloned().unwrap_or_else(|| format!("o{}", i + 1));
                let _ = writeln!(out, "p({name}): {prob}");
            }
        }
        TaskKind::Regression => {
            if let Some(v) = p.value {
                let _ = writeln!(out, "value: {v}");
            }
            let _ = writeln!(out, "output: {}", p.outputs[0]);
        }
    }
}
