import { boot } from "./app.js";

document.addEventListener("DOMContentLoaded", boot);
