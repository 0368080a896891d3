use std::net::SocketAddr;

use anyhow::Context;
use clap::Parser;

/// Serve case-file sessions over HTTP.
#[derive(Parser)]
#[command(name = "verdict-service", version)]
struct Args {
    /// Address to listen on.
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let args = Args::parse();
    let listener = tokio::net::TcpListener::bind(args.addr)
        .await
        .with_context(|| format!("binding {}", args.addr))?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, verdict_service::router())
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
