use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "subscope", version, about = "Analyze journal subscription packages from Unsub exports")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one export and print its summary table.
    Run(RunArgs),
    /// Start the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Unsub export to analyze.
    #[arg(required_unless_present = "sample", conflicts_with = "sample")]
    pub path: Option<PathBuf>,

    /// Use the bundled 431-title sample instead of a file.
    #[arg(long)]
    pub sample: bool,

    /// Restrict the view: METRIC=LO:HI, either bound may be left empty.
    /// Metrics: price, cpu_rank, downloads, citations, authorships, usage, oa_percent.
    #[arg(long = "range", value_name = "METRIC=LO:HI")]
    pub ranges: Vec<String>,

    /// Keep only titles with this Subscribed status (repeatable).
    #[arg(long = "status", value_name = "STATUS")]
    pub statuses: Vec<String>,

    /// Change a decision before summarizing: KEY=STATUS, where KEY is a
    /// record key or an exact, unique title (case-insensitive).
    #[arg(long = "set", value_name = "KEY=STATUS")]
    pub edits: Vec<String>,

    /// Usage weights: `d,c,a`, `dynamic`, or `exported` (the default).
    #[arg(long)]
    pub weights: Option<String>,

    /// Write the twelve chart documents here as {chart_id}.json.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    /// Write the (edited) export here.
    #[arg(long, value_name = "PATH")]
    pub export: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Overrides UNSUB_BIND.
    #[arg(long)]
    pub bind: Option<SocketAddr>,
}
