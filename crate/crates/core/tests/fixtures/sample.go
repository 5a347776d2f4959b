package main

import "fmt"

func main() {
	xs := []int{1, 2}
	for _, v := range xs { fmt.Println(v * 0x10) }
}
