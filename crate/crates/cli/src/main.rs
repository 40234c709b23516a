//! `harmap` command line: run experiment configs, render fields, run every preset.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use harmap::boundary::BoundaryMap;
use harmap::experiments::{self, ExperimentConfig};
use harmap::mesh::DiskMesh;
use harmap::solver::MapField;
use harmap::Error;

#[derive(Parser)]
#[command(
    name = "harmap",
    version,
    about = "Harmonic maps from the disk into CAT(0) targets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config and write its reports
    Run { config: PathBuf },
    /// Render a solved field as SVG
    Render {
        field: PathBuf,
        boundary: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run every shipped preset (outputs go under $HARMAP_OUTPUT_ROOT)
    Suite,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn render(field: &Path, boundary: &Path, output: &Path) -> Result<Vec<PathBuf>, Error> {
    let field: MapField = read_json(field)?;
    let phi: BoundaryMap = read_json(boundary)?;
    if phi.target() != field.target() {
        return Err(Error::InvalidArgument(
            "field and boundary have different targets".into(),
        ));
    }
    let mesh = DiskMesh::from_params(field.mesh_params())?;
    let svg = experiments::render::render_svg(&mesh, &field, &phi)?;
    std::fs::write(output, svg)?;
    Ok(vec![output.to_path_buf()])
}

fn suite() -> Result<Vec<PathBuf>, Error> {
    let mut written = Vec::new();
    for (name, text) in experiments::PRESETS {
        eprintln!("running preset {name}");
        let cfg = ExperimentConfig::from_json(text)?;
        written.extend(experiments::run_and_write(&cfg)?);
    }
    Ok(written)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config } => experiments::run_config(config),
        Command::Render {
            field,
            boundary,
            output,
        } => render(field, boundary, output),
        Command::Suite => suite(),
    };
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", experiments::error_json(&e));
            ExitCode::from(experiments::exit_code(&e) as u8)
        }
    }
}
