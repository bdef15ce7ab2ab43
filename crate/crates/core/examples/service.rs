//! Start the HTTP service on an ephemeral port and talk to it over a plain
//! blocking socket.

use std::sync::Arc;

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpStream};
use supplier_dss::fixtures;
use supplier_dss::service::{router, AppState};
use tokio::net::TcpListener;

fn request(addr: SocketAddr, method: &str, path: &str, body: &str) -> std::io::Result<String> {
    let mut stream = TcpStream::connect(addr)?;
    let head = format!(
        "{method} {path} HTTP/1.1\r\nhost: localhost\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n",
        body.len()
    );
    stream.write_all(head.as_bytes())?;
    stream.write_all(body.as_bytes())?;
    let mut reply = String::new();
    stream.read_to_string(&mut reply)?;
    Ok(reply)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let runtime = tokio::runtime::Runtime::new()?;
    let listener = runtime.block_on(TcpListener::bind("127.0.0.1:0"))?;
    let addr = listener.local_addr()?;
    let app = router(Arc::new(AppState::new(None)));
    runtime.spawn(async move { axum::serve(listener, app).await });

    let created = request(addr, "POST", "/sessions", &fixtures::paper_case().to_json())?;
    println!("{}", created.lines().next().unwrap_or_default());
    let scri = request(addr, "GET", "/sessions/s1/scri?alpha=0.2", "")?;
    println!("{}", scri.split("\r\n\r\n").nth(1).unwrap_or_default());
    let plan = request(addr, "GET", "/sessions/s1/allocation?tvp=260", "")?;
    println!("{}", plan.split("\r\n\r\n").nth(1).unwrap_or_default());
    Ok(())
}
