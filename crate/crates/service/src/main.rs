use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::Parser;
use pcdecomp_service::{router, SessionStore, STORE_DIR_ENV};

#[derive(Debug, Parser)]
#[command(name = "pcdecomp-service", version, about = "Serve pairwise comparison sessions over HTTP")]
struct Args {
    #[arg(long, default_value = "127.0.0.1:8080")]
    listen: SocketAddr,
    /// Session directory.
    #[arg(long, env = STORE_DIR_ENV, default_value = "pcdecomp-sessions")]
    store_dir: PathBuf,
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let args = Args::parse();
    let store = Arc::new(SessionStore::open(&args.store_dir)?);
    let listener = tokio::net::TcpListener::bind(args.listen).await?;
    eprintln!("listening on {} with sessions in {}", listener.local_addr()?, store.dir().display());
    axum::serve(listener, router(store)).await
}
