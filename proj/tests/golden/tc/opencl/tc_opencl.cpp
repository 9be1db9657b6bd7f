// Generated tc (OpenCL host)
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <climits>
#define CL_TARGET_OPENCL_VERSION 120
#include <CL/cl.h>

#ifndef GRAPHDSL_KERNEL_SOURCE
#define GRAPHDSL_KERNEL_SOURCE "tc_opencl.cl"
#endif

typedef struct GraphCsr {
  int n;
  int m;
  int* offsets;
  int* dests;
  int* weights;
  int* rev_offsets;
  int* rev_srcs;
  int* rev_eid;
} GraphCsr;

typedef struct GraphDslRawEdge {
  int u;
  int v;
  int w;
} GraphDslRawEdge;

static int graphdsl_edge_cmp(const void* a, const void* b) {
  const GraphDslRawEdge* x = (const GraphDslRawEdge*)a;
  const GraphDslRawEdge* y = (const GraphDslRawEdge*)b;
  if (x->u != y->u) return x->u < y->u ? -1 : 1;
  if (x->v != y->v) return x->v < y->v ? -1 : 1;
  if (x->w != y->w) return x->w < y->w ? -1 : 1;
  return 0;
}

static GraphCsr graphdsl_load_graph(const char* path, int directed) {
  FILE* f = fopen(path, "r");
  if (!f) {
    fprintf(stderr, "cannot open graph file: %s\n", path);
    exit(1);
  }
  size_t cap = 1024, cnt = 0;
  GraphDslRawEdge* raw = (GraphDslRawEdge*)malloc(cap * sizeof(GraphDslRawEdge));
  char line[512];
  int max_id = -1;
  while (fgets(line, sizeof(line), f)) {
    int u, v, w;
    const char* p = line;
    while (*p == ' ' || *p == '\t') p++;
    if (*p == '#' || *p == '\n' || *p == '\0' || *p == '\r') continue;
    int got = sscanf(p, "%d %d %d", &u, &v, &w);
    if (got < 2) {
      fprintf(stderr, "malformed edge line: %s", line);
      exit(1);
    }
    if (got < 3) w = 1;
    if (cnt + 2 > cap) {
      cap *= 2;
      raw = (GraphDslRawEdge*)realloc(raw, cap * sizeof(GraphDslRawEdge));
    }
    GraphDslRawEdge e;
    e.u = u; e.v = v; e.w = w;
    raw[cnt++] = e;
    if (!directed && u != v) {
      GraphDslRawEdge r;
      r.u = v; r.v = u; r.w = w;
      raw[cnt++] = r;
    }
    if (u > max_id) max_id = u;
    if (v > max_id) max_id = v;
  }
  fclose(f);
  qsort(raw, cnt, sizeof(GraphDslRawEdge), graphdsl_edge_cmp);
  size_t uniq = 0;
  for (size_t i = 0; i < cnt; i++) {
    if (uniq > 0 && raw[uniq - 1].u == raw[i].u && raw[uniq - 1].v == raw[i].v) continue;
    raw[uniq++] = raw[i];
  }
  GraphCsr g;
  g.n = max_id + 1;
  g.m = (int)uniq;
  g.offsets = (int*)calloc(g.n + 1, sizeof(int));
  g.dests = (int*)malloc(uniq * sizeof(int));
  g.weights = (int*)malloc(uniq * sizeof(int));
  for (size_t i = 0; i < uniq; i++) g.offsets[raw[i].u + 1]++;
  for (int i = 0; i < g.n; i++) g.offsets[i + 1] += g.offsets[i];
  for (size_t i = 0; i < uniq; i++) {
    g.dests[i] = raw[i].v;
    g.weights[i] = raw[i].w;
  }
  g.rev_offsets = (int*)calloc(g.n + 1, sizeof(int));
  g.rev_srcs = (int*)malloc(uniq * sizeof(int));
  g.rev_eid = (int*)malloc(uniq * sizeof(int));
  for (size_t i = 0; i < uniq; i++) g.rev_offsets[raw[i].v + 1]++;
  for (int i = 0; i < g.n; i++) g.rev_offsets[i + 1] += g.rev_offsets[i];
  int* cursor = (int*)malloc(g.n * sizeof(int));
  for (int i = 0; i < g.n; i++) cursor[i] = g.rev_offsets[i];
  for (int u = 0; u < g.n; u++) {
    for (int e = g.offsets[u]; e < g.offsets[u + 1]; e++) {
      int slot = cursor[g.dests[e]]++;
      g.rev_srcs[slot] = u;
      g.rev_eid[slot] = e;
    }
  }
  free(cursor);
  free(raw);
  return g;
}

static void graphdsl_free_graph(GraphCsr* g) {
  free(g->offsets);
  free(g->dests);
  free(g->weights);
  free(g->rev_offsets);
  free(g->rev_srcs);
  free(g->rev_eid);
}

static inline int graphdsl_is_edge(const int* offsets, const int* dests, int u, int v) {
  int lo = offsets[u];
  int hi = offsets[u + 1] - 1;
  while (lo <= hi) {
    int mid = lo + (hi - lo) / 2;
    if (dests[mid] == v) return 1;
    if (dests[mid] < v) lo = mid + 1; else hi = mid - 1;
  }
  return 0;
}

static cl_context graphdsl_context;
static cl_command_queue graphdsl_queue;
static cl_program graphdsl_program;

static char* graphdsl_load_text(const char* path) {
  FILE* f = fopen(path, "rb");
  if (!f) {
    fprintf(stderr, "cannot open kernel source: %s\n", path);
    exit(1);
  }
  fseek(f, 0, SEEK_END);
  long size = ftell(f);
  fseek(f, 0, SEEK_SET);
  char* text = (char*)malloc(size + 1);
  size_t got = fread(text, 1, size, f);
  text[got] = '\0';
  fclose(f);
  return text;
}

static void graphdsl_cl_init(const char* kernel_path) {
  cl_platform_id platform;
  cl_device_id device;
  cl_int err;
  clGetPlatformIDs(1, &platform, NULL);
  err = clGetDeviceIDs(platform, CL_DEVICE_TYPE_GPU, 1, &device, NULL);
  if (err != CL_SUCCESS)
    clGetDeviceIDs(platform, CL_DEVICE_TYPE_DEFAULT, 1, &device, NULL);
  graphdsl_context = clCreateContext(NULL, 1, &device, NULL, NULL, &err);
  graphdsl_queue = clCreateCommandQueue(graphdsl_context, device, 0, &err);
  char* source = graphdsl_load_text(kernel_path);
  graphdsl_program = clCreateProgramWithSource(graphdsl_context, 1, (const char**)&source, NULL, &err);
  err = clBuildProgram(graphdsl_program, 1, &device, "", NULL, NULL);
  if (err != CL_SUCCESS) {
    char log[16384];
    clGetProgramBuildInfo(graphdsl_program, device, CL_PROGRAM_BUILD_LOG, sizeof(log), log, NULL);
    fprintf(stderr, "kernel build failed:\n%s\n", log);
    exit(1);
  }
  free(source);
}

long long computetc(const GraphCsr& g) {
  int V = g.n;
  int E = g.m;
  (void)E;
  graphdsl_cl_init(GRAPHDSL_KERNEL_SOURCE);
  size_t graphdsl_global = 1024;
  cl_event graphdsl_event;
  int graphdsl_fill_value = 0;
  (void)graphdsl_fill_value;
  cl_int graphdsl_err = CL_SUCCESS;
  (void)graphdsl_err;

  cl_kernel computetc_kernel_0_kobj = clCreateKernel(graphdsl_program, "computetc_kernel_0", &graphdsl_err);

  // device graph (static: written once, never read back)
  cl_mem gpu_offsets = clCreateBuffer(graphdsl_context, CL_MEM_READ_ONLY, sizeof(int) * (V + 1), NULL, &graphdsl_err);
  clEnqueueWriteBuffer(graphdsl_queue, gpu_offsets, CL_TRUE, 0, sizeof(int) * (V + 1), g.offsets, 0, NULL, NULL);
  cl_mem gpu_dests = clCreateBuffer(graphdsl_context, CL_MEM_READ_ONLY, sizeof(int) * E, NULL, &graphdsl_err);
  clEnqueueWriteBuffer(graphdsl_queue, gpu_dests, CL_TRUE, 0, sizeof(int) * E, g.dests, 0, NULL, NULL);
  // host state
  long long triangleCount = 0;
  // device state
  cl_mem gpu_triangleCount = clCreateBuffer(graphdsl_context, CL_MEM_READ_WRITE, sizeof(long long), NULL, &graphdsl_err);

  triangleCount = 0;
  clEnqueueWriteBuffer(graphdsl_queue, gpu_triangleCount, CL_TRUE, 0, sizeof(long long), &triangleCount, 0, NULL, NULL);
  clSetKernelArg(computetc_kernel_0_kobj, 0, sizeof(int), &V);
  clSetKernelArg(computetc_kernel_0_kobj, 1, sizeof(cl_mem), &gpu_offsets);
  clSetKernelArg(computetc_kernel_0_kobj, 2, sizeof(cl_mem), &gpu_dests);
  clSetKernelArg(computetc_kernel_0_kobj, 3, sizeof(cl_mem), &gpu_triangleCount);
  clEnqueueNDRangeKernel(graphdsl_queue, computetc_kernel_0_kobj, 1, NULL, &graphdsl_global, NULL, 0, NULL, &graphdsl_event);
  clWaitForEvents(1, &graphdsl_event);
  clReleaseEvent(graphdsl_event);
  clEnqueueReadBuffer(graphdsl_queue, gpu_triangleCount, CL_TRUE, 0, sizeof(long long), &triangleCount, 0, NULL, NULL);
  clReleaseMemObject(gpu_offsets);
  clReleaseMemObject(gpu_dests);
  clReleaseMemObject(gpu_triangleCount);
  clReleaseKernel(computetc_kernel_0_kobj);
  return triangleCount;
}

int main(int argc, char** argv) {
  if (argc < 3) {
    fprintf(stderr, "usage: %s <graph> <directed 0|1>\n", argv[0]);
    return 2;
  }
  GraphCsr g = graphdsl_load_graph(argv[1], atoi(argv[2]));
  int V = g.n;
  (void)V;
  long long result = computetc(g);
  printf("return\t%lld\n", (long long)result);
  graphdsl_free_graph(&g);
  return 0;
}
