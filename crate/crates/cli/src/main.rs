use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ideoscale_cli::commands::{self, registry_from_flag};
use ideoscale_cli::{formats, server, CliError};
use ideoscale_core::positioning::Aggregation;

/// Continuous left-right scoring of political texts from multilabel party
/// probabilities.
#[derive(Parser)]
#[command(name = "ideoscale", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PartiesArg {
    /// Ordered, comma-separated party names (default: the six German
    /// parties).
    #[arg(long, global = true)]
    parties: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Derive party vectors from a stance matrix CSV.
    Positions {
        /// Stance matrix CSV (statement_id,party,stance[,election]).
        #[arg(long)]
        stance: PathBuf,
        /// Output vector-set JSON.
        #[arg(long)]
        out: PathBuf,
        /// Placement JSON for non-default party sets.
        #[arg(long)]
        placement: Option<PathBuf>,
        /// Pool statements across elections or average per election.
        #[arg(long, value_parser = parse_aggregation, default_value = "pooled")]
        aggregation: Aggregation,
        #[command(flatten)]
        parties: PartiesArg,
    },
    /// Score a records JSONL file against a vector set.
    Score {
        /// Input records JSONL.
        #[arg(long)]
        records: PathBuf,
        /// Vector-set JSON.
        #[arg(long)]
        vectors: PathBuf,
        /// Politicalness threshold (inclusive).
        #[arg(long, default_value_t = 0.8)]
        tau: f64,
        /// Worker threads (1 = sequential). Output is identical for any
        /// value.
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Output scored JSONL; errors go to <out>.errors.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare outlet-level mean scores against survey ratings.
    EvaluateNews {
        /// Scored JSONL (from `score`).
        #[arg(long)]
        scored: PathBuf,
        /// Ratings CSV (outlet,survey_rating).
        #[arg(long)]
        ratings: PathBuf,
        #[arg(long, default_value_t = 0.8)]
        tau: f64,
        /// Output directory for outlets.csv and summary.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Party-attribution accuracy by text length.
    EvaluateTweets {
        /// Scored JSONL with author_party and word_count per record.
        #[arg(long)]
        scored: PathBuf,
        /// Comma-separated bucket edges; trailing `+` opens the last bucket.
        #[arg(long, default_value = "1,10,20,30,40,50,60,70,80,90,100,+")]
        buckets: String,
        /// Output directory for buckets.csv and summary.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Refine party vectors against outlet ratings.
    Optimize {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        ratings: PathBuf,
        #[arg(long)]
        vectors: PathBuf,
        #[arg(long, default_value_t = 0.8)]
        tau: f64,
        /// Displacement bound for movable parties.
        #[arg(long, default_value_t = 0.25)]
        delta_default: f64,
        /// Parties pinned in place (repeatable).
        #[arg(long, default_values_t = [String::from("Linke"), String::from("AfD")])]
        pin: Vec<String>,
        /// Recorded in the report for reproducibility.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.1)]
        initial_step: f64,
        #[arg(long, default_value_t = 1e-4)]
        min_step: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iterations: u64,
        /// Output directory for optimized_vectors.json and trace.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Inter-party association matrix (optionally combined with a sentiment
    /// matrix).
    Associations {
        #[arg(long)]
        stance: PathBuf,
        #[arg(long)]
        sentiment: Option<PathBuf>,
        /// Output matrix CSV.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        parties: PartiesArg,
    },
    /// Convergent-validity statistics between rating sources.
    Validity {
        /// Sources CSV (media,a_rating,b_x,b_y,c_label,c_rating,articles).
        #[arg(long)]
        sources: PathBuf,
        /// Output correlations JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract labeled statements from parliamentary protocol files.
    Autolabel {
        /// Protocol files, processed in order.
        #[arg(required = true)]
        protocols: Vec<PathBuf>,
        /// Output labeled CSV (text,party,stance).
        #[arg(long)]
        out: PathBuf,
        /// Also label reactions from the speaker's own party.
        #[arg(long)]
        include_self_party: bool,
        /// Keep only agreement rows.
        #[arg(long)]
        positive_only: bool,
        #[command(flatten)]
        parties: PartiesArg,
    },
    /// Similarity gate between original and paraphrase embeddings.
    Gate {
        /// Originals embedding JSONL ({"id", "vector"}).
        #[arg(long)]
        originals: PathBuf,
        /// Paraphrase embedding JSONL, matched by id.
        #[arg(long)]
        paraphrases: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        /// Output report JSON.
        #[arg(long)]
        out: PathBuf,
    },
    /// Paraphrase one text via the configured provider (PARAPHRASE_ENDPOINT
    /// / PARAPHRASE_KEY) or the offline mock.
    Paraphrase {
        #[arg(long)]
        text: String,
        /// child, teenager, adult, eloquent or tweet.
        #[arg(long)]
        persona: String,
        #[arg(long, default_value = "de")]
        language: String,
        /// Use the offline mock provider.
        #[arg(long)]
        mock: bool,
    },
    /// Serve the stateless scoring endpoint over HTTP.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        vectors: PathBuf,
        #[arg(long, default_value_t = 0.8)]
        tau: f64,
    },
}

fn parse_aggregation(s: &str) -> Result<Aggregation, String> {
    match s {
        "pooled" => Ok(Aggregation::Pooled),
        "per-election" => Ok(Aggregation::PerElection),
        other => Err(format!("expected 'pooled' or 'per-election', got '{other}'")),
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Positions {
            stance,
            out,
            placement,
            aggregation,
            parties,
        } => {
            let registry = registry_from_flag(parties.parties.as_deref())?;
            commands::positions::run(&stance, &out, &registry, placement.as_deref(), aggregation)
        }
        Command::Score {
            records,
            vectors,
            tau,
            threads,
            out,
        } => commands::score::run(&records, &vectors, tau, threads, &out),
        Command::EvaluateNews {
            scored,
            ratings,
            tau,
            out,
        } => commands::evaluate::run_news(&scored, &ratings, tau, &out),
        Command::EvaluateTweets {
            scored,
            buckets,
            out,
        } => commands::evaluate::run_tweets(&scored, &buckets, &out),
        Command::Optimize {
            records,
            ratings,
            vectors,
            tau,
            delta_default,
            pin,
            seed,
            initial_step,
            min_step,
            max_iterations,
            out,
        } => commands::optimize::run(
            &records,
            &ratings,
            &vectors,
            tau,
            delta_default,
            &pin,
            seed,
            initial_step,
            min_step,
            max_iterations,
            &out,
        ),
        Command::Associations {
            stance,
            sentiment,
            out,
            parties,
        } => {
            let registry = registry_from_flag(parties.parties.as_deref())?;
            commands::associations::run(&stance, sentiment.as_deref(), &out, &registry)
        }
        Command::Validity { sources, out } => commands::validity::run(&sources, &out),
        Command::Autolabel {
            protocols,
            out,
            include_self_party,
            positive_only,
            parties,
        } => {
            let registry = registry_from_flag(parties.parties.as_deref())?;
            commands::autolabel::run(&protocols, &out, &registry, include_self_party, positive_only)
        }
        Command::Gate {
            originals,
            paraphrases,
            threshold,
            out,
        } => commands::gate::run(&originals, &paraphrases, threshold, &out),
        Command::Paraphrase {
            text,
            persona,
            language,
            mock,
        } => commands::paraphrase::run(&text, &persona, &language, mock),
        Command::Serve { port, vectors, tau } => {
            if !(0.0..=1.0).contains(&tau) {
                return Err(CliError::validation(format!("--tau {tau} outside [0, 1]")));
            }
            let set = formats::read_vectors_json(&vectors)?;
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(server::serve(port, set, tau)).map_err(CliError::from)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
