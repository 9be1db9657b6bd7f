// Treats generated OpenCL C kernels as host C++ for type checking: the
// address-space qualifiers vanish and the builtins get host declarations.
#pragma once

#define __kernel
#define __global
#define __local
#define __constant

typedef unsigned long ulong;
typedef unsigned int uint;

int get_global_id(int dim);
int get_global_size(int dim);
int get_local_id(int dim);

int atomic_add(volatile int* addr, int value);
int atomic_min(volatile int* addr, int value);
int atomic_max(volatile int* addr, int value);
int atomic_cmpxchg(volatile int* addr, int cmp, int value);
long atom_add(volatile long* addr, long value);
long atom_min(volatile long* addr, long value);
long atom_max(volatile long* addr, long value);
ulong atom_cmpxchg(volatile ulong* addr, ulong cmp, ulong value);
