use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Duration;

use clap::Parser;
use netpulse_server::state::{
    DEFAULT_EVENT_LIMIT, DEFAULT_LISTEN, DEFAULT_MAX_SESSIONS, DEFAULT_MAX_UPLOAD_BYTES,
};
use netpulse_server::ServerConfig;
use tracing_subscriber::EnvFilter;

/// Serve training sessions over HTTP and WebSocket.
#[derive(Debug, Parser)]
#[command(name = "netpulse-server", version)]
struct Args {
    /// Address to listen on.
    #[arg(long, env = "NETPULSE_LISTEN", default_value = DEFAULT_LISTEN)]
    listen: SocketAddr,
    /// Directory with the browser bundle, served at `/`.
    #[arg(long, env = "NETPULSE_STATIC_DIR")]
    static_dir: Option<PathBuf>,
    /// Largest accepted request body, in bytes.
    #[arg(long, env = "NETPULSE_MAX_UPLOAD", default_value_t = DEFAULT_MAX_UPLOAD_BYTES)]
    max_upload: usize,
    /// Largest number of sessions that may exist at once.
    #[arg(long, env = "NETPULSE_MAX_SESSIONS", default_value_t = DEFAULT_MAX_SESSIONS)]
    max_sessions: usize,
    /// Pause between consecutive events of a running session, in milliseconds.
    #[arg(long, env = "NETPULSE_EVENT_DELAY_MS", default_value_t = 0)]
    event_delay_ms: u64,
    /// Retained events per session.
    #[arg(long, env = "NETPULSE_EVENT_LIMIT", default_value_t = DEFAULT_EVENT_LIMIT)]
    event_limit: u64,
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .init();
    let args = Args::parse();
    if let Some(dir) = &args.static_dir {
        if !dir.is_dir() {
            eprintln!("static directory {} does not exist", dir.display());
            std::process::exit(2);
        }
    }
    netpulse_server::serve(ServerConfig {
        listen: args.listen,
        static_dir: args.static_dir,
        max_upload_bytes: args.max_upload,
        max_sessions: args.max_sessions,
        event_delay: Duration::from_millis(args.event_delay_ms),
        event_limit: args.event_limit,
    })
    .await
}
