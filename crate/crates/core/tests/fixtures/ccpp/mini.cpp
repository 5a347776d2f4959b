class A { public: virtual int f() const { return 0; } }; bool b = true; auto x = new A;
