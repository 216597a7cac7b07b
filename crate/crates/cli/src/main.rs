fn main() {
    println!("batlab");
}
