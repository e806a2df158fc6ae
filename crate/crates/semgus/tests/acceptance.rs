fn main() {
    println!("acceptance: no criteria wired yet");
}
