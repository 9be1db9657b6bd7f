// Generated pr (CUDA backend)
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <climits>
#include <cuda_runtime.h>

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

__global__ void computepr_kernel_0(int V, const int* gpu_offsets, double* gpu_rank, double* gpu_dangling) {
  unsigned u_11 = blockIdx.x * blockDim.x + threadIdx.x;
  if (u_11 >= V) return;
  if ((gpu_offsets[u_11 + 1] - gpu_offsets[u_11]) == 0) {
    atomicAdd(gpu_dangling, (double)(gpu_rank[u_11]));
  }
}

__global__ void computepr_kernel_1(int V, const int* gpu_offsets, const int* gpu_rev_offsets, const int* gpu_rev_srcs, const int* gpu_rev_eid, double damping, double dangling, int iter, int maxIter, double numNodes, double threshold, double* gpu_rank, double* gpu_rankNext, bool* gpu_converged) {
  unsigned v_12 = blockIdx.x * blockDim.x + threadIdx.x;
  if (v_12 >= V) return;
  double total = dangling / numNodes;
  for (int edge = gpu_rev_offsets[v_12]; edge < gpu_rev_offsets[v_12 + 1]; edge++) {
    int u_14 = gpu_rev_srcs[edge];
    total += gpu_rank[u_14] / (gpu_offsets[u_14 + 1] - gpu_offsets[u_14]);
  }
  double newRank = (1.0 - damping) / numNodes + damping * total;
  double change = newRank - gpu_rank[v_12];
  if (change < 0.0) {
    change = 0.0 - change;
  }
  if (change >= threshold && iter < maxIter) {
    *gpu_converged = false;
  }
  gpu_rankNext[v_12] = newRank;
}

__global__ void computepr_kernel_2(int V, double* gpu_rank, double* gpu_rankNext) {
  unsigned v_17 = blockIdx.x * blockDim.x + threadIdx.x;
  if (v_17 >= V) return;
  gpu_rank[v_17] = gpu_rankNext[v_17];
}

void computepr(const GraphCsr& g, double damping, double threshold, int maxIter, double* rank) {
  int V = g.n;
  int E = g.m;
  (void)E;
  const int threadsPerBlock = 1024;
  int numBlocks = (V + threadsPerBlock - 1) / threadsPerBlock;
  (void)numBlocks;

  // device graph (static: copied in once, never copied back)
  int* gpu_offsets;
  cudaMalloc(&gpu_offsets, sizeof(int) * (V + 1));
  cudaMemcpy(gpu_offsets, g.offsets, sizeof(int) * (V + 1), cudaMemcpyHostToDevice);
  int* gpu_rev_offsets;
  cudaMalloc(&gpu_rev_offsets, sizeof(int) * (V + 1));
  cudaMemcpy(gpu_rev_offsets, g.rev_offsets, sizeof(int) * (V + 1), cudaMemcpyHostToDevice);
  int* gpu_rev_srcs;
  cudaMalloc(&gpu_rev_srcs, sizeof(int) * E);
  cudaMemcpy(gpu_rev_srcs, g.rev_srcs, sizeof(int) * E, cudaMemcpyHostToDevice);
  int* gpu_rev_eid;
  cudaMalloc(&gpu_rev_eid, sizeof(int) * E);
  cudaMemcpy(gpu_rev_eid, g.rev_eid, sizeof(int) * E, cudaMemcpyHostToDevice);
  // host state
  double* rankNext = (double*)calloc(V, sizeof(double));
  double numNodes = 0;
  int iter = 0;
  bool converged = false;
  double dangling = 0;
  // device state
  double* gpu_rank;
  cudaMalloc(&gpu_rank, sizeof(double) * V);
  double* gpu_rankNext;
  cudaMalloc(&gpu_rankNext, sizeof(double) * V);
  bool* gpu_converged;
  cudaMalloc(&gpu_converged, sizeof(bool));
  double* gpu_dangling;
  cudaMalloc(&gpu_dangling, sizeof(double));

  numNodes = V;
  for (int i = 0; i < V; i++) {
    rank[i] = 1.0 / numNodes;
  }
  for (int i = 0; i < V; i++) {
    rankNext[i] = 0.0;
  }
  iter = 0;
  converged = false;
  cudaMemcpy(gpu_rank, rank, sizeof(double) * V, cudaMemcpyHostToDevice);
  cudaMemcpy(gpu_rankNext, rankNext, sizeof(double) * V, cudaMemcpyHostToDevice);
  while (!converged) {
    converged = true;
    cudaMemcpy(gpu_converged, &converged, sizeof(bool), cudaMemcpyHostToDevice);
    dangling = 0.0;
    cudaMemcpy(gpu_dangling, &dangling, sizeof(double), cudaMemcpyHostToDevice);
    computepr_kernel_0<<<numBlocks, threadsPerBlock>>>(V, gpu_offsets, gpu_rank, gpu_dangling);
    cudaDeviceSynchronize();
    cudaMemcpy(&dangling, gpu_dangling, sizeof(double), cudaMemcpyDeviceToHost);
    computepr_kernel_1<<<numBlocks, threadsPerBlock>>>(V, gpu_offsets, gpu_rev_offsets, gpu_rev_srcs, gpu_rev_eid, damping, dangling, iter, maxIter, numNodes, threshold, gpu_rank, gpu_rankNext, gpu_converged);
    cudaDeviceSynchronize();
    computepr_kernel_2<<<numBlocks, threadsPerBlock>>>(V, gpu_rank, gpu_rankNext);
    cudaDeviceSynchronize();
    iter += 1;
    cudaMemcpy(&converged, gpu_converged, sizeof(bool), cudaMemcpyDeviceToHost);
  }
  cudaMemcpy(rank, gpu_rank, sizeof(double) * V, cudaMemcpyDeviceToHost);
  cudaMemcpy(rankNext, gpu_rankNext, sizeof(double) * V, cudaMemcpyDeviceToHost);
  cudaFree(gpu_offsets);
  cudaFree(gpu_rev_offsets);
  cudaFree(gpu_rev_srcs);
  cudaFree(gpu_rev_eid);
  cudaFree(gpu_rank);
  cudaFree(gpu_rankNext);
  cudaFree(gpu_converged);
  cudaFree(gpu_dangling);
  free(rankNext);
}

int main(int argc, char** argv) {
  if (argc < 3) {
    fprintf(stderr, "usage: %s <graph> <directed 0|1> <damping> <threshold> <maxIter>\n", argv[0]);
    return 2;
  }
  GraphCsr g = graphdsl_load_graph(argv[1], atoi(argv[2]));
  int V = g.n;
  (void)V;
  double damping = (double)atof(argv[3]);
  double threshold = (double)atof(argv[4]);
  int maxIter = (int)atoll(argv[5]);
  double* rank = (double*)calloc(V, sizeof(double));
  computepr(g, damping, threshold, maxIter, rank);
  for (int i = 0; i < V; i++) {
    printf("rank\t%d\t%.17g\n", i, (double)rank[i]);
  }
  graphdsl_free_graph(&g);
  return 0;
}
